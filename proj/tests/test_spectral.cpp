#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rmdp/benchmarks.hpp"
#include "rmdp/spectral.hpp"

using namespace rmdp;

namespace {
Matrix make(int n, std::initializer_list<double> vals) {
    Matrix m(n, n);
    auto it = vals.begin();
    for (int r = 0; r < n; r++)
        for (int c = 0; c < n; c++) m(r, c) = *it++;
    return m;
}
}  // namespace

TEST_CASE("spectral radius of scalars") {
    CHECK(spectral_radius(make(1, {0.9})) == doctest::Approx(0.9).epsilon(1e-12));
    double entry = 0.9 * std::exp(0.1);
    CHECK(spectral_radius(make(1, {entry})) == doctest::Approx(entry).epsilon(1e-12));
    CHECK(spectral_radius(make(1, {entry})) == doctest::Approx(0.99465).epsilon(1e-4));
}

TEST_CASE("triangular matrix with a defective eigenvalue") {
    // power iteration alone cannot certify this one; the bisection must
    CHECK(spectral_radius(make(2, {0.5, 0.5, 0.0, 0.5})) ==
          doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("stochastic and nilpotent matrices") {
    CHECK(spectral_radius(make(2, {0.3, 0.7, 0.6, 0.4})) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(spectral_radius(make(2, {0.0, 1.0, 0.0, 0.0})) == 0.0);
    CHECK(spectral_radius(make(2, {0.0, 0.0, 0.0, 0.0})) == 0.0);
    // permutation: complex pair on the unit circle
    CHECK(spectral_radius(make(2, {0.0, 1.0, 1.0, 0.0})) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("homogeneity of the radius") {
    for (uint64_t seed : {5ull, 6ull, 7ull}) {
        TransientMdp model = rmdp::testing::random_transient_mdp(seed);
        PolicyMatrices pm = build_policy_matrices(model, DecisionRule::uniform(model));
        double rho = spectral_radius(pm.P);
        Matrix scaled = pm.P;
        for (int r = 0; r < scaled.rows(); r++)
            for (int c = 0; c < scaled.cols(); c++) scaled(r, c) *= 3.5;
        CHECK(spectral_radius(scaled) == doctest::Approx(3.5 * rho).epsilon(1e-8));
    }
}

TEST_CASE("rejects negative and non-square input") {
    CHECK_THROWS(spectral_radius(make(2, {0.1, -0.2, 0.3, 0.4})));
    Matrix rect(2, 3);
    CHECK_THROWS(spectral_radius(rect));
}

TEST_CASE("log-domain exponential radius matches the dense one") {
    TransientMdp chain = single_state_chain({});
    DecisionRule rule = DecisionRule::deterministic(chain, {0});
    for (double beta : {0.1, 0.5, 0.52680}) {
        ExponentialMatrices em = build_exponential_matrices(chain, rule, beta);
        double dense = spectral_radius(em.B);
        double logged = log_spectral_radius_exponential(chain, rule, beta);
        CHECK(logged == doctest::Approx(std::log(dense)).epsilon(1e-9));
    }
    // stays finite far past what dense arithmetic can represent
    double log_rho = log_spectral_radius_exponential(chain, rule, 5000.0);
    CHECK(log_rho == doctest::Approx(std::log(0.9) + 5000.0 * 0.2).epsilon(1e-9));
}

TEST_CASE("chain transience across epsilon") {
    TransientMdp chain = single_state_chain({});
    DecisionRule rule = DecisionRule::deterministic(chain, {0});
    TransienceVerdict v = check_transient_policy(chain, rule);
    CHECK(v.transient);
    CHECK(v.radius == doctest::Approx(0.9).epsilon(1e-10));

    TransientMdp absorbing = single_state_chain({1.0, -0.2, ChainVariant::Transient});
    TransienceVerdict bad =
        check_transient_policy(absorbing, DecisionRule::deterministic(absorbing, {0}));
    CHECK_FALSE(bad.transient);
    CHECK(bad.radius == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(bad.violating_policy.has_value());
}

TEST_CASE("quit-everywhere policy is immediately transient") {
    TransientMdp gr = gamblers_ruin({});
    indvec ids(gr.num_states(), 0);
    int quit = gambler_quit_action(7);
    for (int c = 1; c < 7; c++) ids[c] = quit;
    TransienceVerdict v = check_transient_policy(gr, DecisionRule::deterministic(gr, ids));
    CHECK(v.transient);
    CHECK(v.radius == 0.0);
}

TEST_CASE("exhaustive transience of the strict gamblers ruin") {
    TransientMdp gr = gamblers_ruin({});
    TransienceVerdict v = check_transient_exhaustive(gr, 100000);
    CHECK(v.transient);
    CHECK(v.policies_checked == 5040);  // 2*3*4*5*6*7 middle-state combinations
    CHECK(v.radius < 1.0);
}

TEST_CASE("literal mode exposes the bet-0 policy") {
    TransientMdp gr = gamblers_ruin({0.68, 7, GamblerInitial::UniformMiddle,
                                     GamblerActionMode::Literal});
    TransienceVerdict v = check_transient_exhaustive(gr, 10'000'000);
    CHECK_FALSE(v.transient);
    REQUIRE(v.violating_policy.has_value());
    bool bets_zero = false;
    for (int c = 1; c < 7; c++)
        if ((*v.violating_policy)[c] == 0) bets_zero = true;
    CHECK(bets_zero);
}

TEST_CASE("constructed absorbing action is caught") {
    std::vector<Transition> ts{{0, 0, 0, 1.0, 0.0},
                               {0, 1, TransientMdp::SINK, 1.0, 0.0},
                               {1, 0, TransientMdp::SINK, 1.0, 0.0}};
    TransientMdp model(2, 2, ts, {0.5, 0.5});
    TransienceVerdict v = check_transient_exhaustive(model, 100);
    CHECK_FALSE(v.transient);
    REQUIRE(v.violating_policy.has_value());
    CHECK((*v.violating_policy)[0] == 0);
}

TEST_CASE("exhaustive check respects the budget") {
    TransientMdp gr = gamblers_ruin({});
    CHECK_THROWS_AS(check_transient_exhaustive(gr, 100), BudgetExceededError);
}

TEST_CASE("every deterministic gamblers-ruin rule is transient (Lemma-style sweep)") {
    TransientMdp gr = gamblers_ruin({});
    long checked = 0;
    for_each_deterministic_rule(gr, [&](const indvec& ids) {
        if (checked % 97 == 0) {  // sampled; the full sweep runs above
            TransienceVerdict v =
                check_transient_policy(gr, DecisionRule::deterministic(gr, ids));
            CHECK(v.transient);
        }
        checked++;
        return true;
    });
    CHECK(checked == 5040);
}
