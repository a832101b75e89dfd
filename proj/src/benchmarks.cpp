#include "rmdp/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rmdp {

TransientMdp single_state_chain(const ChainParams& params) {
    const double eps = params.epsilon;
    const double r = params.reward;
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon must be in [0,1]");

    std::vector<Transition> ts;
    if (params.variant == ChainVariant::Discounted) {
        ts.push_back({0, 0, 0, 1.0, r});
    } else {
        if (eps > 0.0) ts.push_back({0, 0, 0, eps, r});
        if (eps < 1.0) ts.push_back({0, 0, TransientMdp::SINK, 1.0 - eps, r});
    }
    return TransientMdp(1, 1, std::move(ts), {1.0}, {"s"}, {"a"});
}

double analytic_chain_erm(const ChainParams& params, double beta,
                          std::optional<long> horizon) {
    if (params.variant != ChainVariant::Transient)
        throw std::invalid_argument("analytic value applies to the transient variant");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    const double eps = params.epsilon;
    const double r = params.reward;

    if (horizon) {
        long T = *horizon;
        if (T < 0) throw std::invalid_argument("horizon must be nonnegative");
        if (T == 0) return 0.0;
        // exit after k loops earns (k+1) r with mass (1-eps) eps^k; surviving
        // all T steps earns T r with mass eps^T
        numvec terms;
        terms.reserve(T + 1);
        if (eps < 1.0) {
            double log_exit = std::log(1.0 - eps);
            double log_eps = eps > 0.0 ? std::log(eps) : NEG_INF;
            for (long k = 0; k < T; k++) {
                if (eps == 0.0 && k > 0) break;
                terms.push_back(log_exit + k * log_eps - beta * (k + 1) * r);
            }
        }
        if (eps > 0.0) terms.push_back(T * std::log(eps) - beta * T * r);
        return -log_sum_exp(terms) / beta;
    }

    const double growth = eps * std::exp(-beta * r);
    if (growth >= 1.0) return NEG_INF;
    return -std::log((1.0 - eps) * std::exp(-beta * r) / (1.0 - growth)) / beta;
}

int gambler_quit_action(int cap) { return cap; }

TransientMdp gamblers_ruin(const GamblersRuinParams& params) {
    const double q = params.q;
    const int cap = params.cap;
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must be in (0,1)");
    if (cap < 2) throw std::invalid_argument("cap must be at least 2");

    const int n = cap + 1;           // capitals 0..cap
    const int quit = gambler_quit_action(cap);
    const int n_actions = cap + 1;   // bets 0..cap-1 plus quit

    std::vector<Transition> ts;
    ts.push_back({0, 0, TransientMdp::SINK, 1.0, -1.0});
    ts.push_back({cap, 0, TransientMdp::SINK, 1.0, static_cast<double>(cap)});
    for (int c = 1; c < cap; c++) {
        int lowest_bet = params.mode == GamblerActionMode::Literal ? 0 : 1;
        for (int a = lowest_bet; a <= c; a++) {
            int lose = c - a;
            if (c + a > cap) {
                // surpassing the cap ends the game at the current capital
                ts.push_back({c, a, TransientMdp::SINK, q, static_cast<double>(c + a)});
            } else if (c + a == lose) {
                ts.push_back({c, a, c, 1.0, 0.0});
                continue;
            } else {
                ts.push_back({c, a, c + a, q, 0.0});
            }
            ts.push_back({c, a, lose, 1.0 - q, 0.0});
        }
        ts.push_back({c, quit, TransientMdp::SINK, 1.0, static_cast<double>(c)});
    }

    numvec mu(n, 0.0);
    if (params.initial == GamblerInitial::UniformAll) {
        for (int s = 0; s < n; s++) mu[s] = 1.0 / n;
    } else {
        for (int c = 1; c < cap; c++) mu[c] = 1.0 / (cap - 1);
    }

    std::vector<std::string> state_labels, action_labels;
    for (int s = 0; s < n; s++) state_labels.push_back("capital" + std::to_string(s));
    for (int a = 0; a < cap; a++) action_labels.push_back("bet" + std::to_string(a));
    action_labels.push_back("quit");

    return TransientMdp(n, n_actions, std::move(ts), std::move(mu), std::move(state_labels),
                        std::move(action_labels));
}

numvec nested_cvar_chain_values(double epsilon, double alpha, double r, int horizon) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("epsilon must be in [0,1]");
    if (alpha > epsilon)
        throw std::invalid_argument(
            "the divergence regime requires epsilon >= alpha (CVaR envelope must allow "
            "staying put with probability one)");
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");

    // dual form: v_t = r + min{q1 v_{t-1}} with q1 in the CVaR envelope
    const double q1_hi = std::min(1.0, epsilon / alpha);
    const double q1_lo = std::max(0.0, 1.0 - (1.0 - epsilon) / alpha);

    numvec values{0.0};
    for (int t = 1; t <= horizon; t++) {
        double prev = values.back();
        values.push_back(r + (prev <= 0.0 ? q1_hi : q1_lo) * prev);
    }
    return values;
}

}  // namespace rmdp
