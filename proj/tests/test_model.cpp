#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rmdp/benchmarks.hpp"
#include "rmdp/erm.hpp"
#include "rmdp/model.hpp"

using namespace rmdp;

TEST_CASE("chain model validates") {
    TransientMdp chain = single_state_chain({});
    ValidationReport report = validate_model(chain);
    CHECK(report.valid());
    CHECK(report.warnings.empty());
}

TEST_CASE("row mass violation is reported") {
    std::vector<Transition> ts{{0, 0, 0, 0.85, 0.0}, {0, 0, TransientMdp::SINK, 0.1, 0.0}};
    TransientMdp bad(1, 1, ts, {1.0});
    ValidationReport report = validate_model(bad);
    CHECK_FALSE(report.valid());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.find("row mass") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("generated gamblers ruin validates with a mu warning") {
    TransientMdp gr = gamblers_ruin({});
    ValidationReport report = validate_model(gr);
    CHECK(report.valid());
    // capitals 0 and 7 carry no initial mass under the default
    CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("policy matrices of the chain") {
    TransientMdp chain = single_state_chain({});
    DecisionRule rule = DecisionRule::deterministic(chain, {0});
    PolicyMatrices pm = build_policy_matrices(chain, rule);
    CHECK(pm.P(0, 0) == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(pm.p_term[0] == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("single-action rows are copied verbatim") {
    std::vector<Transition> ts{{0, 0, 1, 0.25, 1.0},
                               {0, 0, TransientMdp::SINK, 0.75, -1.0},
                               {1, 0, TransientMdp::SINK, 1.0, 0.5}};
    TransientMdp model(2, 1, ts, {0.5, 0.5});
    PolicyMatrices pm = build_policy_matrices(model, DecisionRule::uniform(model));
    CHECK(pm.P(0, 1) == 0.25);
    CHECK(pm.p_term[0] == 0.75);
    CHECK(pm.p_term[1] == 1.0);
}

TEST_CASE("uniform rule rows equal action-averaged kernels") {
    TransientMdp model = rmdp::testing::random_transient_mdp(42, 3, 3);
    DecisionRule uniform = DecisionRule::uniform(model);
    PolicyMatrices pm = build_policy_matrices(model, uniform);

    for (int s = 0; s < model.num_states(); s++) {
        const auto& avail = model.actions(s);
        numvec row(model.num_states(), 0.0);
        double term = 0.0;
        for (int a : avail) {
            for (const Outcome& o : model.outcomes(s, a)) {
                if (o.next == TransientMdp::SINK)
                    term += o.prob / avail.size();
                else
                    row[o.next] += o.prob / avail.size();
            }
        }
        for (int t = 0; t < model.num_states(); t++)
            CHECK(pm.P(s, t) == doctest::Approx(row[t]).epsilon(1e-12));
        CHECK(pm.p_term[s] == doctest::Approx(term).epsilon(1e-12));
        double mass = pm.p_term[s];
        for (int t = 0; t < model.num_states(); t++) mass += pm.P(s, t);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("exponential matrices on the chain") {
    TransientMdp chain = single_state_chain({});
    DecisionRule rule = DecisionRule::deterministic(chain, {0});
    ExponentialMatrices em = build_exponential_matrices(chain, rule, 0.5);
    CHECK(em.B(0, 0) == doctest::Approx(0.9 * std::exp(0.1)).epsilon(1e-15));
    CHECK(em.b[0] == doctest::Approx(0.1 * std::exp(0.1)).epsilon(1e-15));
}

TEST_CASE("exponential matrices reduce to probabilities at zero rewards") {
    TransientMdp model = rmdp::testing::random_transient_mdp(7, 4, 3);
    std::vector<Transition> ts = model.transitions();
    for (Transition& t : ts) t.reward = 0.0;
    TransientMdp zero(model.num_states(), model.num_actions(), ts, model.initial());

    DecisionRule rule = DecisionRule::uniform(zero);
    PolicyMatrices pm = build_policy_matrices(zero, rule);
    ExponentialMatrices em = build_exponential_matrices(zero, rule, 0.7);
    for (int s = 0; s < zero.num_states(); s++) {
        CHECK(em.b[s] == pm.p_term[s]);
        for (int t = 0; t < zero.num_states(); t++) CHECK(em.B(s, t) == pm.P(s, t));
    }
}

TEST_CASE("beta to zero limit recovers probability matrices") {
    TransientMdp model = rmdp::testing::random_transient_mdp(11, 4, 3);
    DecisionRule rule = DecisionRule::uniform(model);
    PolicyMatrices pm = build_policy_matrices(model, rule);
    ExponentialMatrices em = build_exponential_matrices(model, rule, 1e-9);
    for (int s = 0; s < model.num_states(); s++) {
        CHECK(em.b[s] == doctest::Approx(pm.p_term[s]).epsilon(1e-8));
        for (int t = 0; t < model.num_states(); t++)
            CHECK(em.B(s, t) == doctest::Approx(pm.P(s, t)).epsilon(1e-8));
    }
}

TEST_CASE("exponential overflow is a diagnostic") {
    std::vector<Transition> ts{{0, 0, TransientMdp::SINK, 1.0, -800.0}};
    TransientMdp model(1, 1, ts, {1.0});
    DecisionRule rule = DecisionRule::deterministic(model, {0});
    CHECK_THROWS_AS(build_exponential_matrices(model, rule, 1.0), UnboundedRiskError);
}

TEST_CASE("raising a reward shrinks its exponential entry") {
    TransientMdp model = rmdp::testing::random_transient_mdp(13, 3, 2);
    std::vector<Transition> ts = model.transitions();
    ts[0].reward += 0.5;
    TransientMdp bumped(model.num_states(), model.num_actions(), ts, model.initial());
    DecisionRule rule = DecisionRule::uniform(model);
    ExponentialMatrices before = build_exponential_matrices(model, rule, 0.4);
    ExponentialMatrices after = build_exponential_matrices(bumped, rule, 0.4);
    const Transition& t0 = model.transitions()[0];
    if (t0.next != TransientMdp::SINK)
        CHECK(after.B(t0.state, t0.next) < before.B(t0.state, t0.next));
    else
        CHECK(after.b[t0.state] < before.b[t0.state]);
}

TEST_CASE("discount_to_trc reproduces the transient chain") {
    TransientMdp left = single_state_chain({0.9, -0.2, ChainVariant::Discounted});
    TransientMdp converted = discount_to_trc(left, 0.9);
    TransientMdp right = single_state_chain({0.9, -0.2, ChainVariant::Transient});

    REQUIRE(converted.transitions().size() == right.transitions().size());
    PolicyMatrices a = build_policy_matrices(converted, DecisionRule::uniform(converted));
    PolicyMatrices b = build_policy_matrices(right, DecisionRule::uniform(right));
    CHECK(a.P(0, 0) == doctest::Approx(b.P(0, 0)).epsilon(1e-15));
    CHECK(a.p_term[0] == doctest::Approx(b.p_term[0]).epsilon(1e-15));
    for (const Transition& t : converted.transitions())
        CHECK(t.reward == doctest::Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("discount_to_trc at gamma zero sends all mass to the sink") {
    TransientMdp left = single_state_chain({0.9, -0.2, ChainVariant::Discounted});
    TransientMdp converted = discount_to_trc(left, 0.0);
    for (const Transition& t : converted.transitions()) CHECK(t.next == TransientMdp::SINK);
    SolveReport rn = risk_neutral_solve(converted);
    CHECK(rn.objective == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("discount_to_trc preserves risk-neutral optimal values") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        TransientMdp disc = rmdp::testing::random_discounted_mdp(seed, 3, 3);
        double gamma = 0.7;
        numvec oracle = rmdp::testing::discounted_optimal_values(disc, gamma);
        TransientMdp trc = discount_to_trc(disc, gamma);
        SolveReport rn = risk_neutral_solve(trc);
        REQUIRE(rn.status == SolveStatus::Bounded);
        for (int s = 0; s < disc.num_states(); s++)
            CHECK(rn.value.v[s] == doctest::Approx(oracle[s]).epsilon(1e-8));
    }
}

TEST_CASE("discount_to_trc rejects bad gamma and sink inputs") {
    TransientMdp left = single_state_chain({0.9, -0.2, ChainVariant::Discounted});
    CHECK_THROWS(discount_to_trc(left, 1.0));
    CHECK_THROWS(discount_to_trc(left, -0.1));
    TransientMdp right = single_state_chain({});
    CHECK_THROWS_AS(discount_to_trc(right, 0.9), ModelError);
}
