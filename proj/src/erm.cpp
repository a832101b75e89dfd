#include "rmdp/erm.hpp"

#include <algorithm>
#include <cmath>

#include "rmdp/spectral.hpp"
#include "rmdp/simplex.hpp"

namespace rmdp {

namespace {

/// Per-(state, action) row of the exponential Bellman operator:
/// value = sum_i coeff_i * w[next_i] - sink.
struct ExpActionRow {
    std::vector<std::pair<int, double>> coeffs;
    double sink = 0.0;
};

struct ExpCache {
    std::vector<std::vector<ExpActionRow>> rows;  // [s][k] aligned with model.actions(s)
    double beta;
};

ExpCache build_exp_cache(const TransientMdp& model, double beta) {
    ExpCache cache;
    cache.beta = beta;
    cache.rows.resize(model.num_states());
    for (int s = 0; s < model.num_states(); s++) {
        const indvec& avail = model.actions(s);
        cache.rows[s].resize(avail.size());
        for (size_t k = 0; k < avail.size(); k++) {
            ExpActionRow& row = cache.rows[s][k];
            for (const Outcome& o : model.outcomes(s, avail[k])) {
                double exponent = -beta * o.reward;
                if (exponent > EXP_OVERFLOW_LIMIT)
                    throw UnboundedRiskError(s, avail[k], o.next, exponent);
                double value = o.prob * std::exp(exponent);
                if (o.next == TransientMdp::SINK)
                    row.sink += value;
                else
                    row.coeffs.emplace_back(o.next, value);
            }
        }
    }
    return cache;
}

double row_value(const ExpActionRow& row, const numvec& w) {
    double acc = -row.sink;
    for (const auto& [next, coeff] : row.coeffs) acc += coeff * w[next];
    return acc;
}

/// One application of L*: new iterate and greedy action ids (smallest id wins ties).
std::pair<numvec, indvec> greedy_step(const TransientMdp& model, const ExpCache& cache,
                                      const numvec& w) {
    const int n = model.num_states();
    numvec out(n);
    indvec ids(n);
    for (int s = 0; s < n; s++) {
        const indvec& avail = model.actions(s);
        double best = NEG_INF;
        int best_id = avail.empty() ? 0 : avail[0];
        for (size_t k = 0; k < avail.size(); k++) {
            double val = row_value(cache.rows[s][k], w);
            if (val > best) {
                best = val;
                best_id = avail[k];
            }
        }
        out[s] = best;
        ids[s] = best_id;
    }
    return {std::move(out), std::move(ids)};
}

double min_entry(const numvec& xs) {
    double m = POS_INF;
    for (double x : xs) m = std::min(m, x);
    return m;
}

double exp_radius_capped(const TransientMdp& model, const DecisionRule& rule, double beta) {
    double log_rho = log_spectral_radius_exponential(model, rule, beta);
    return log_rho > EXP_OVERFLOW_LIMIT ? 1e300 : std::exp(log_rho);
}

SolveReport finish_bounded(const TransientMdp& model, SolveMethod method, double beta,
                           numvec w, const ExpCache& cache, long iterations, numvec trace) {
    SolveReport report;
    report.method = method;
    report.status = SolveStatus::Bounded;
    report.beta = beta;
    auto [w_next, ids] = greedy_step(model, cache, w);
    report.residual = inf_norm_diff(w_next, w);
    report.exp_value = {std::move(w), beta};
    report.value = erm_from_exponential(report.exp_value);
    report.policy_actions = ids;
    report.policy = DecisionRule::deterministic(model, ids);
    report.objective = aggregate_initial(report.value, model.initial(), beta);
    report.iterations = iterations;
    report.trace = std::move(trace);
    return report;
}

SolveReport finish_unbounded(const TransientMdp& model, SolveMethod method, double beta,
                             const indvec& witness_ids, double witness_radius, long iterations,
                             numvec trace) {
    SolveReport report;
    report.method = method;
    report.status = SolveStatus::Unbounded;
    report.beta = beta;
    report.objective = NEG_INF;
    report.value = {numvec(model.num_states(), NEG_INF), beta};
    report.policy_actions = witness_ids;
    report.policy = DecisionRule::deterministic(model, witness_ids);
    report.witness = UnboundedWitness{witness_ids, witness_radius};
    report.iterations = iterations;
    report.trace = std::move(trace);
    return report;
}

}  // namespace

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Bounded: return "bounded";
        case SolveStatus::Unbounded: return "unbounded";
        default: return "max_iterations";
    }
}

std::string to_string(SolveMethod method) {
    switch (method) {
        case SolveMethod::VI: return "vi";
        case SolveMethod::PI: return "pi";
        case SolveMethod::LP: return "lp";
        default: return "risk_neutral";
    }
}

numvec exp_bellman_apply(const ExponentialMatrices& mats, const numvec& w) {
    if (static_cast<int>(w.size()) != mats.B.rows())
        throw std::invalid_argument("w dimension does not match B");
    numvec out = mats.B.multiply(w);
    for (size_t s = 0; s < out.size(); s++) out[s] -= mats.b[s];
    return out;
}

std::pair<numvec, DecisionRule> exp_bellman_optimal(const TransientMdp& model, double beta,
                                                    const numvec& w) {
    if (static_cast<int>(w.size()) != model.num_states())
        throw std::invalid_argument("w dimension does not match model");
    ExpCache cache = build_exp_cache(model, beta);
    auto [out, ids] = greedy_step(model, cache, w);
    return {std::move(out), DecisionRule::deterministic(model, ids)};
}

SolveReport value_iteration(const TransientMdp& model, double beta, const SolveOptions& opts) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (beta < WSPACE_MIN_BETA) return erm_solve_logspace(model, beta, opts);
    ExpCache cache = build_exp_cache(model, beta);

    numvec w(model.num_states(), 0.0);
    numvec trace;
    double last_check_residual = POS_INF;

    for (long k = 1; k <= opts.max_iter; k++) {
        auto [w_next, ids] = greedy_step(model, cache, w);
        double residual = inf_norm_diff(w_next, w);
        if (opts.collect_trace) trace.push_back(residual);
        if (opts.on_iterate) opts.on_iterate(w_next);

        if (residual <= opts.tol)
            return finish_bounded(model, SolveMethod::VI, beta, std::move(w_next), cache, k,
                                  std::move(trace));

        if (min_entry(w_next) < opts.divergence_floor) {
            DecisionRule rule = DecisionRule::deterministic(model, ids);
            return finish_unbounded(model, SolveMethod::VI, beta, ids,
                                    exp_radius_capped(model, rule, beta), k, std::move(trace));
        }

        // Lemma-2 witness: a greedy rule with rho(B^d) >= 1 while the
        // residual has stopped shrinking and the iterate has drifted deep.
        if (opts.radius_check_every > 0 && k % opts.radius_check_every == 0) {
            if (residual >= last_check_residual && min_entry(w_next) < -1e50) {
                DecisionRule rule = DecisionRule::deterministic(model, ids);
                double log_rho = log_spectral_radius_exponential(model, rule, beta);
                if (log_rho >= -1e-10)
                    return finish_unbounded(model, SolveMethod::VI, beta, ids,
                                            exp_radius_capped(model, rule, beta), k,
                                            std::move(trace));
            }
            last_check_residual = residual;
        }
        w = std::move(w_next);
    }

    SolveReport report;
    report.method = SolveMethod::VI;
    report.status = SolveStatus::MaxIterations;
    report.beta = beta;
    report.exp_value = {w, beta};
    report.value = erm_from_exponential(report.exp_value);
    report.objective = aggregate_initial(report.value, model.initial(), beta);
    auto [w1, ids] = greedy_step(model, cache, w);
    report.residual = inf_norm_diff(w1, w);
    report.policy_actions = ids;
    report.policy = DecisionRule::deterministic(model, ids);
    report.iterations = opts.max_iter;
    report.trace = std::move(trace);
    return report;
}

ExponentialValueFunction policy_evaluation_exact(const TransientMdp& model,
                                                 const DecisionRule& rule, double beta) {
    ExponentialMatrices em = build_exponential_matrices(model, rule, beta);
    double rho = spectral_radius(em.B);
    if (rho >= 1.0 - 1e-10) throw UnboundedPolicyError(rho);

    const int n = model.num_states();
    Matrix a(n, n);
    numvec rhs(n);
    for (int r = 0; r < n; r++) {
        for (int c = 0; c < n; c++) a(r, c) = (r == c ? 1.0 : 0.0) - em.B(r, c);
        rhs[r] = -em.b[r];
    }
    return {solve_linear(std::move(a), rhs), beta};
}

SolveReport policy_iteration(const TransientMdp& model, double beta,
                             std::optional<DecisionRule> init, const SolveOptions& opts) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    ExpCache cache = build_exp_cache(model, beta);

    indvec ids;
    if (init) {
        double rho = exp_radius_capped(model, *init, beta);
        if (rho >= 1.0 - 1e-10) throw UnboundedPolicyError(rho);
        ids = init->action_ids(model);
    } else {
        ids = greedy_step(model, cache, numvec(model.num_states(), 0.0)).second;
        double rho = exp_radius_capped(model, DecisionRule::deterministic(model, ids), beta);
        if (rho >= 1.0 - 1e-10) {
            // no radius-feasible greedy start; value iteration needs none
            SolveReport vi = value_iteration(model, beta, opts);
            vi.method = SolveMethod::PI;
            if (vi.status != SolveStatus::Bounded) return vi;
            ids = vi.policy_actions;
        }
    }

    numvec trace;
    for (long round = 1; round <= opts.max_iter; round++) {
        DecisionRule rule = DecisionRule::deterministic(model, ids);
        ExponentialValueFunction wvf;
        try {
            wvf = policy_evaluation_exact(model, rule, beta);
        } catch (const UnboundedPolicyError& e) {
            return finish_unbounded(model, SolveMethod::PI, beta, ids, e.radius, round,
                                    std::move(trace));
        }
        auto [w_next, greedy_ids] = greedy_step(model, cache, wvf.w);
        if (opts.collect_trace) trace.push_back(inf_norm_diff(w_next, wvf.w));
        if (greedy_ids == ids)
            return finish_bounded(model, SolveMethod::PI, beta, std::move(wvf.w), cache, round,
                                  std::move(trace));
        ids = std::move(greedy_ids);
    }

    SolveReport report;
    report.method = SolveMethod::PI;
    report.status = SolveStatus::MaxIterations;
    report.beta = beta;
    report.policy_actions = ids;
    report.policy = DecisionRule::deterministic(model, ids);
    report.iterations = opts.max_iter;
    report.trace = std::move(trace);
    return report;
}

SolveReport lp_solve(const TransientMdp& model, double beta, const SolveOptions&) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    ExpCache cache = build_exp_cache(model, beta);
    const int n = model.num_states();

    // one row per (s, a): (B^a - I)_s . w <= b^a_s
    int m = 0;
    for (int s = 0; s < n; s++) m += static_cast<int>(model.actions(s).size());
    Matrix a(m, n);
    numvec rhs(m);
    int r = 0;
    for (int s = 0; s < n; s++) {
        for (size_t k = 0; k < model.actions(s).size(); k++) {
            const ExpActionRow& row = cache.rows[s][k];
            for (const auto& [next, coeff] : row.coeffs) a(r, next) += coeff;
            a(r, s) -= 1.0;
            rhs[r] = row.sink;
            r++;
        }
    }

    LpResult lp = simplex_free_min(numvec(n, 1.0), a, rhs);
    if (lp.status == LpStatus::Unbounded) {
        indvec ids = greedy_step(model, cache, numvec(n, 0.0)).second;
        DecisionRule rule = DecisionRule::deterministic(model, ids);
        return finish_unbounded(model, SolveMethod::LP, beta, ids,
                                exp_radius_capped(model, rule, beta), lp.pivots, {});
    }
    if (lp.status == LpStatus::IterationLimit) {
        SolveReport report;
        report.method = SolveMethod::LP;
        report.status = SolveStatus::MaxIterations;
        report.beta = beta;
        report.iterations = lp.pivots;
        return report;
    }
    return finish_bounded(model, SolveMethod::LP, beta, std::move(lp.x), cache, lp.pivots, {});
}

std::pair<std::vector<ExponentialValueFunction>, std::vector<DecisionRule>> finite_horizon_solve(
    const TransientMdp& model, double beta, int horizon, const numvec& terminal_z) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    const int n = model.num_states();

    numvec z = terminal_z.empty() ? numvec(n, 1.0) : terminal_z;
    if (static_cast<int>(z.size()) != n) throw std::invalid_argument("terminal_z length");
    for (double v : z)
        if (v < 0.0) throw std::invalid_argument("terminal_z must be nonnegative");

    ExpCache cache = build_exp_cache(model, beta);
    numvec w(n);
    for (int s = 0; s < n; s++) w[s] = -z[s];

    std::vector<ExponentialValueFunction> stages{{w, beta}};
    std::vector<DecisionRule> rules;
    for (int t = 1; t <= horizon; t++) {
        auto [w_next, ids] = greedy_step(model, cache, w);
        for (double v : w_next)
            if (!(v > -1e300))
                throw SolverError("finite-horizon recursion overflowed at stage " +
                                  std::to_string(t) + "; ERM return is unbounded at this beta");
        rules.push_back(DecisionRule::deterministic(model, ids));
        w = std::move(w_next);
        stages.push_back({w, beta});
    }
    return {std::move(stages), std::move(rules)};
}

namespace {

double expected_action_value(const TransientMdp& model, int s, int a, const numvec& v) {
    double acc = 0.0;
    for (const Outcome& o : model.outcomes(s, a))
        acc += o.prob * (o.reward + (o.next == TransientMdp::SINK ? 0.0 : v[o.next]));
    return acc;
}

std::pair<numvec, indvec> greedy_expected(const TransientMdp& model, const numvec& v) {
    const int n = model.num_states();
    numvec out(n);
    indvec ids(n);
    for (int s = 0; s < n; s++) {
        double best = NEG_INF;
        int best_id = model.actions(s)[0];
        for (int a : model.actions(s)) {
            double val = expected_action_value(model, s, a, v);
            if (val > best) {
                best = val;
                best_id = a;
            }
        }
        out[s] = best;
        ids[s] = best_id;
    }
    return {std::move(out), std::move(ids)};
}

}  // namespace

SolveReport risk_neutral_solve(const TransientMdp& model, const SolveOptions& opts) {
    const int n = model.num_states();
    numvec v(n, 0.0);
    indvec ids = greedy_expected(model, v).second;
    numvec trace;

    long rounds = 0;
    while (rounds < 1000) {
        rounds++;
        DecisionRule rule = DecisionRule::deterministic(model, ids);
        PolicyMatrices pm = build_policy_matrices(model, rule);
        double rho = spectral_radius(pm.P);
        if (rho >= 1.0 - 1e-10)
            return finish_unbounded(model, SolveMethod::RiskNeutral, 0.0, ids, rho, rounds,
                                    std::move(trace));

        // exact evaluation: (I - P) v = expected one-step reward
        Matrix a(n, n);
        numvec rbar(n, 0.0);
        for (int s = 0; s < n; s++) {
            for (int c = 0; c < n; c++) a(s, c) = (s == c ? 1.0 : 0.0) - pm.P(s, c);
            const indvec& avail = model.actions(s);
            for (size_t k = 0; k < avail.size(); k++) {
                if (rule.probs[s][k] == 0.0) continue;
                for (const Outcome& o : model.outcomes(s, avail[k]))
                    rbar[s] += rule.probs[s][k] * o.prob * o.reward;
            }
        }
        v = solve_linear(std::move(a), rbar);

        auto [v_next, greedy_ids] = greedy_expected(model, v);
        double residual = inf_norm_diff(v_next, v);
        if (opts.collect_trace) trace.push_back(residual);
        if (greedy_ids == ids) {
            SolveReport report;
            report.method = SolveMethod::RiskNeutral;
            report.status = SolveStatus::Bounded;
            report.beta = 0.0;
            report.value = {v, 0.0};
            report.objective = aggregate_initial(report.value, model.initial(), 0.0);
            report.policy_actions = ids;
            report.policy = DecisionRule::deterministic(model, ids);
            report.residual = residual;
            report.iterations = rounds;
            report.trace = std::move(trace);
            return report;
        }
        ids = std::move(greedy_ids);
    }

    SolveReport report;
    report.method = SolveMethod::RiskNeutral;
    report.status = SolveStatus::MaxIterations;
    report.beta = 0.0;
    report.value = {v, 0.0};
    report.objective = aggregate_initial(report.value, model.initial(), 0.0);
    report.policy_actions = ids;
    report.policy = DecisionRule::deterministic(model, ids);
    report.iterations = rounds;
    report.trace = std::move(trace);
    return report;
}

ValueFunction erm_from_exponential(const ExponentialValueFunction& wvf) {
    ValueFunction out{numvec(wvf.w.size()), wvf.beta};
    for (size_t s = 0; s < wvf.w.size(); s++) {
        double w = wvf.w[s];
        if (w > 0.0)
            throw SolverError("exponential value contract violated: w[" + std::to_string(s) +
                              "] = " + std::to_string(w) + " > 0");
        if (w == 0.0)
            out.v[s] = POS_INF;
        else if (w == NEG_INF)
            out.v[s] = NEG_INF;
        else
            out.v[s] = -std::log(-w) / wvf.beta;
    }
    return out;
}

double aggregate_initial(const ValueFunction& value, const numvec& mu, double beta) {
    if (mu.size() != value.v.size()) throw std::invalid_argument("mu dimension mismatch");
    if (beta == 0.0) {
        double acc = 0.0;
        for (size_t s = 0; s < mu.size(); s++) {
            if (mu[s] == 0.0) continue;
            if (value.v[s] == NEG_INF) return NEG_INF;
            acc += mu[s] * value.v[s];
        }
        return acc;
    }
    numvec terms;
    terms.reserve(mu.size());
    for (size_t s = 0; s < mu.size(); s++) {
        if (mu[s] == 0.0) continue;
        if (value.v[s] == NEG_INF) return NEG_INF;
        terms.push_back(std::log(mu[s]) - beta * value.v[s]);
    }
    return -log_sum_exp(terms) / beta;
}

namespace {

/// Log-domain Bellman row: value(s,a,v) = -beta^{-1} lse(log p - beta (r + v')).
struct LogActionRow {
    std::vector<std::pair<int, double>> next_base;  // (next, log p - beta r)
    double sink_term = NEG_INF;                     // lse over sink outcomes of log p - beta r
};

std::pair<numvec, indvec> greedy_logspace(const TransientMdp& model,
                                          const std::vector<std::vector<LogActionRow>>& rows,
                                          double beta, const numvec& v) {
    const int n = model.num_states();
    numvec out(n);
    indvec ids(n);
    numvec terms;
    for (int s = 0; s < n; s++) {
        const indvec& avail = model.actions(s);
        double best = NEG_INF;
        int best_id = avail[0];
        for (size_t k = 0; k < avail.size(); k++) {
            const LogActionRow& row = rows[s][k];
            terms.clear();
            if (row.sink_term > NEG_INF) terms.push_back(row.sink_term);
            for (const auto& [next, base] : row.next_base) {
                if (v[next] == POS_INF) continue;  // exp(-beta * inf) = 0
                terms.push_back(base - beta * v[next]);
            }
            double lse = log_sum_exp(terms);
            double val = lse == NEG_INF ? POS_INF : -lse / beta;
            if (val > best) {
                best = val;
                best_id = avail[k];
            }
        }
        out[s] = best;
        ids[s] = best_id;
    }
    return {std::move(out), std::move(ids)};
}

double residual_logspace(const numvec& a, const numvec& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); i++) {
        if (a[i] == POS_INF && b[i] == POS_INF) continue;
        if (a[i] == POS_INF || b[i] == POS_INF) return POS_INF;
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

}  // namespace

SolveReport erm_solve_logspace(const TransientMdp& model, double beta,
                               const SolveOptions& opts) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    const int n = model.num_states();

    std::vector<std::vector<LogActionRow>> rows(n);
    for (int s = 0; s < n; s++) {
        const indvec& avail = model.actions(s);
        rows[s].resize(avail.size());
        for (size_t k = 0; k < avail.size(); k++) {
            numvec sink_terms;
            for (const Outcome& o : model.outcomes(s, avail[k])) {
                if (o.prob == 0.0) continue;
                double base = std::log(o.prob) - beta * o.reward;
                if (o.next == TransientMdp::SINK)
                    sink_terms.push_back(base);
                else
                    rows[s][k].next_base.emplace_back(o.next, base);
            }
            rows[s][k].sink_term = log_sum_exp(sink_terms);
        }
    }

    // v = +inf is the log-domain image of the optimistic start w = 0
    numvec v(n, POS_INF);
    numvec trace;
    double last_check_residual = POS_INF;
    int stalled_checks = 0;

    for (long k = 1; k <= opts.max_iter; k++) {
        auto [v_next, ids] = greedy_logspace(model, rows, beta, v);
        double residual = residual_logspace(v_next, v);
        if (opts.collect_trace) trace.push_back(residual);

        if (residual <= opts.tol) {
            SolveReport report;
            report.method = SolveMethod::VI;
            report.status = SolveStatus::Bounded;
            report.beta = beta;
            report.value = {v_next, beta};
            report.residual = residual;
            report.policy_actions = ids;
            report.policy = DecisionRule::deterministic(model, ids);
            report.objective = aggregate_initial(report.value, model.initial(), beta);
            report.iterations = k;
            report.trace = std::move(trace);
            // w is reported only when representable in doubles
            bool representable = true;
            for (double x : v_next)
                if (!(std::abs(x) * beta <= EXP_OVERFLOW_LIMIT)) representable = false;
            if (representable) {
                numvec w(n);
                for (int s = 0; s < n; s++) w[s] = -std::exp(-beta * v_next[s]);
                report.exp_value = {std::move(w), beta};
            }
            return report;
        }

        bool deep = min_entry(v_next) < -1e9;
        if (deep || (opts.radius_check_every > 0 && k % opts.radius_check_every == 0)) {
            if (deep || (residual >= last_check_residual - opts.tol && k >= 300)) {
                DecisionRule rule = DecisionRule::deterministic(model, ids);
                double log_rho = log_spectral_radius_exponential(model, rule, beta);
                if (log_rho >= -1e-10) {
                    if (deep || ++stalled_checks >= 2)
                        return finish_unbounded(model, SolveMethod::VI, beta, ids,
                                                log_rho > EXP_OVERFLOW_LIMIT
                                                    ? 1e300
                                                    : std::exp(log_rho),
                                                k, std::move(trace));
                } else {
                    stalled_checks = 0;
                }
            }
            if (k % std::max(opts.radius_check_every, 1) == 0) last_check_residual = residual;
        }
        v = std::move(v_next);
    }

    SolveReport report;
    report.method = SolveMethod::VI;
    report.status = SolveStatus::MaxIterations;
    report.beta = beta;
    report.value = {v, beta};
    report.objective = aggregate_initial(report.value, model.initial(), beta);
    report.iterations = opts.max_iter;
    report.trace = std::move(trace);
    return report;
}

SolveReport erm_solve_auto(const TransientMdp& model, double beta, const SolveOptions& opts) {
    if (beta == 0.0) return risk_neutral_solve(model, opts);
    if (beta >= WSPACE_MIN_BETA && beta * model.max_abs_reward() <= LOGSPACE_EXPONENT_BUDGET)
        return lp_solve(model, beta, opts);
    return erm_solve_logspace(model, beta, opts);
}

}  // namespace rmdp
