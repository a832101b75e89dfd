// Test-only oracles: brute-force and closed-form routes kept independent of
// the solver implementations they check.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rmdp/model.hpp"
#include "rmdp/simulate.hpp"
#include "rmdp/types.hpp"

namespace rmdp::testing {

/// Seeded random transient MDP: every (s, a) row carries at least 5% sink
/// mass, so rho(P^d) <= 0.95 under every policy. Rewards are uniform in
/// [-1, 1]; the initial distribution is strictly positive.
inline TransientMdp random_transient_mdp(uint64_t seed, int max_states = 6,
                                         int max_actions = 4) {
    EpisodeRng rng(splitmix64(seed));
    int n_states = 2 + static_cast<int>(rng.uniform01() * (max_states - 1));
    n_states = std::min(n_states, max_states);
    int n_actions = 1 + static_cast<int>(rng.uniform01() * max_actions);
    n_actions = std::min(n_actions, max_actions);

    std::vector<Transition> ts;
    for (int s = 0; s < n_states; s++) {
        int n_avail = 1 + static_cast<int>(rng.uniform01() * n_actions);
        n_avail = std::min(n_avail, n_actions);
        for (int a = 0; a < n_avail; a++) {
            double sink_prob = 0.05 + 0.45 * rng.uniform01();
            int n_targets = 1 + static_cast<int>(rng.uniform01() * 3);
            numvec raw(n_targets);
            double total = 0.0;
            for (double& x : raw) total += (x = 0.05 + rng.uniform01());
            std::vector<int> targets;
            for (int k = 0; k < n_targets; k++)
                targets.push_back(static_cast<int>(rng.uniform01() * n_states) % n_states);
            // merge duplicate targets
            numvec mass(n_states, 0.0);
            for (int k = 0; k < n_targets; k++)
                mass[targets[k]] += (1.0 - sink_prob) * raw[k] / total;
            for (int t = 0; t < n_states; t++)
                if (mass[t] > 0.0) ts.push_back({s, a, t, mass[t], 2.0 * rng.uniform01() - 1.0});
            ts.push_back({s, a, TransientMdp::SINK, sink_prob, 2.0 * rng.uniform01() - 1.0});
        }
    }

    numvec mu(n_states);
    double total = 0.0;
    for (double& m : mu) total += (m = 0.05 + rng.uniform01());
    for (double& m : mu) m /= total;
    return TransientMdp(n_states, n_actions, std::move(ts), std::move(mu));
}

/// Sink-free random model (every row fully over non-sink states), for the
/// discounted-to-TRC conversion tests.
inline TransientMdp random_discounted_mdp(uint64_t seed, int max_states = 4,
                                          int max_actions = 3) {
    EpisodeRng rng(splitmix64(seed ^ 0xD15C0ULL));
    int n_states = 2 + static_cast<int>(rng.uniform01() * (max_states - 1));
    n_states = std::min(n_states, max_states);
    int n_actions = 1 + static_cast<int>(rng.uniform01() * max_actions);
    n_actions = std::min(n_actions, max_actions);

    std::vector<Transition> ts;
    for (int s = 0; s < n_states; s++) {
        for (int a = 0; a < n_actions; a++) {
            numvec mass(n_states, 0.0);
            double total = 0.0;
            for (double& x : mass) total += (x = 0.05 + rng.uniform01());
            for (int t = 0; t < n_states; t++)
                ts.push_back({s, a, t, mass[t] / total, 2.0 * rng.uniform01() - 1.0});
        }
    }
    numvec mu(n_states);
    double total = 0.0;
    for (double& m : mu) total += (m = 0.05 + rng.uniform01());
    for (double& m : mu) m /= total;
    return TransientMdp(n_states, n_actions, std::move(ts), std::move(mu));
}

/// Discounted optimal values by plain value iteration, run to convergence.
inline numvec discounted_optimal_values(const TransientMdp& model, double gamma) {
    numvec v(model.num_states(), 0.0);
    for (int it = 0; it < 100000; it++) {
        numvec next(model.num_states());
        for (int s = 0; s < model.num_states(); s++) {
            double best = NEG_INF;
            for (int a : model.actions(s)) {
                double acc = 0.0;
                for (const Outcome& o : model.outcomes(s, a))
                    acc += o.prob * (o.reward + gamma * v[o.next]);
                best = std::max(best, acc);
            }
            next[s] = best;
        }
        double diff = inf_norm_diff(next, v);
        v = std::move(next);
        if (diff <= 1e-14) break;
    }
    return v;
}

/// A finite return distribution as (probability, total reward) atoms.
using Atoms = std::vector<std::pair<double, double>>;

/// Enumerates every trajectory of a Markov deterministic policy
/// (stage_actions[t][s] = action at stage t) from state s for the given
/// horizon, accumulating the exact return distribution.
inline void enumerate_trajectories(const TransientMdp& model,
                                   const std::vector<indvec>& stage_actions, int horizon,
                                   int t, int s, double prob, double ret, Atoms& out) {
    if (t == horizon || s == TransientMdp::SINK) {
        out.emplace_back(prob, ret);
        return;
    }
    int a = stage_actions[t][s];
    for (const Outcome& o : model.outcomes(s, a))
        enumerate_trajectories(model, stage_actions, horizon, t + 1, o.next, prob * o.prob,
                               ret + o.reward, out);
}

/// ERM of a finite distribution of atoms, through log-sum-exp.
inline double erm_of_atoms(const Atoms& atoms, double beta) {
    numvec terms;
    for (const auto& [p, x] : atoms)
        if (p > 0.0) terms.push_back(std::log(p) - beta * x);
    return -log_sum_exp(terms) / beta;
}

/// Per-start-state ERM value of a Markov deterministic policy over a finite
/// horizon, by exhaustive trajectory enumeration.
inline numvec markov_policy_values(const TransientMdp& model,
                                   const std::vector<indvec>& stage_actions, int horizon,
                                   double beta) {
    numvec values(model.num_states());
    for (int s = 0; s < model.num_states(); s++) {
        Atoms atoms;
        enumerate_trajectories(model, stage_actions, horizon, 0, s, 1.0, 0.0, atoms);
        values[s] = erm_of_atoms(atoms, beta);
    }
    return values;
}

/// Visits every Markov deterministic policy for the horizon (an odometer over
/// per-stage, per-state action choices).
template <typename Visit>
void for_each_markov_policy(const TransientMdp& model, int horizon, Visit visit) {
    const int n = model.num_states();
    std::vector<std::vector<size_t>> pick(horizon, std::vector<size_t>(n, 0));
    std::vector<indvec> actions(horizon, indvec(n));
    while (true) {
        for (int t = 0; t < horizon; t++)
            for (int s = 0; s < n; s++) actions[t][s] = model.actions(s)[pick[t][s]];
        visit(actions);
        int t = horizon - 1, s = n - 1;
        while (t >= 0) {
            if (++pick[t][s] < model.actions(s).size()) break;
            pick[t][s] = 0;
            if (--s < 0) {
                s = n - 1;
                t--;
            }
        }
        if (t < 0) return;
    }
}

}  // namespace rmdp::testing
