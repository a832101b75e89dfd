#include "rmdp/evar.hpp"

#include <algorithm>
#include <cmath>

namespace rmdp {

BetaGrid build_beta_grid(double alpha, double delta, double beta0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    const double log_alpha = std::log(alpha);
    const double beta_max = -log_alpha / delta;
    if (!(beta0 > 0.0 && beta0 < beta_max))
        throw std::invalid_argument(
            "beta0 must lie in (0, -log(alpha)/delta); shrink beta0 or enlarge delta");

    BetaGrid grid{alpha, delta, beta0, {}};
    double beta = beta0;
    grid.betas.push_back(beta);
    // reciprocal recurrence: 1/b_{k+1} = 1/b_k + delta/log(alpha)
    while (true) {
        double denom = beta * delta + log_alpha;
        if (!(denom < 0.0)) break;
        double next = beta * log_alpha / denom;
        if (!(next < beta_max) || !std::isfinite(next)) break;
        grid.betas.push_back(next);
        beta = next;
    }
    grid.betas.push_back(beta_max);
    return grid;
}

double h_value(double g, double beta, double alpha) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (g == NEG_INF) return NEG_INF;
    return g + std::log(alpha) / beta;
}

double find_beta0(const TransientMdp& model, double alpha, double delta,
                  const EvarOptions& opts) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");

    SolveOptions solver = opts.solver;
    solver.collect_trace = false;
    const double g0 = risk_neutral_solve(model, solver).objective;
    if (g0 == NEG_INF) throw SolverError("risk-neutral value is unbounded; no beta0 exists");

    double beta0 = -std::log(alpha) / delta;
    for (int i = 0; i < opts.max_halvings; i++) {
        double g = erm_solve_auto(model, beta0, solver).objective;
        if (g0 - g <= delta) return beta0;
        beta0 /= 2.0;
    }
    throw IterationCapError("find_beta0 stopped after " + std::to_string(opts.max_halvings) +
                            " halvings; g*(beta) is numerically indistinguishable from g*(0)");
}

EvarSolution evar_solve(const TransientMdp& model, double alpha, double delta,
                        const EvarOptions& opts) {
    SolveOptions solver = opts.solver;
    solver.collect_trace = false;

    const double g0 = risk_neutral_solve(model, solver).objective;
    if (g0 == NEG_INF) throw SolverError("risk-neutral value is unbounded");

    const double beta_max = -std::log(alpha) / delta;
    double beta0 = beta_max;
    int halvings = 0;
    for (;; halvings++) {
        if (halvings > opts.max_halvings)
            throw IterationCapError("beta0 halving loop exceeded its cap");
        double g = erm_solve_auto(model, beta0, solver).objective;
        if (g0 - g <= delta) break;
        beta0 /= 2.0;
    }

    // find_beta0 may legitimately stop at the endpoint (zero-variance
    // returns); the grid then degenerates to the single point beta_max.
    numvec betas;
    if (beta0 >= beta_max)
        betas = {beta_max};
    else
        betas = build_beta_grid(alpha, delta, beta0).betas;

    EvarSolution sol;
    sol.alpha = alpha;
    sol.delta = delta;
    sol.beta0 = beta0;
    sol.beta0_halvings = halvings;
    sol.beta_star = betas.front();
    sol.evar_lower = NEG_INF;

    bool any_bounded = false;
    indvec best_policy;
    for (double beta : betas) {
        SolveReport rep = erm_solve_auto(model, beta, solver);
        double h = h_value(rep.objective, beta, alpha);
        sol.per_beta.push_back({beta, rep.objective, h, rep.status});
        if (rep.status == SolveStatus::Bounded) {
            any_bounded = true;
            // ties break toward the smallest grid index
            if (h > sol.evar_lower) {
                sol.evar_lower = h;
                sol.beta_star = beta;
                best_policy = rep.policy_actions;
            }
        }
    }
    if (!any_bounded)
        throw SolverError("every grid point has an unbounded ERM value; no EVaR policy");

    sol.policy_actions = best_policy;
    sol.policy = DecisionRule::deterministic(model, best_policy);
    return sol;
}

AuditReport grid_error_audit(const TransientMdp& model, const BetaGrid& grid, int n_dense,
                             const EvarOptions& opts) {
    if (n_dense < 2) throw std::invalid_argument("n_dense must be at least 2");
    SolveOptions solver = opts.solver;
    solver.collect_trace = false;

    auto h_at = [&](double beta) {
        return h_value(erm_solve_auto(model, beta, solver).objective, beta, grid.alpha);
    };

    AuditReport report{};
    report.n_dense = n_dense;
    report.max_grid_h = NEG_INF;
    for (double beta : grid.betas) report.max_grid_h = std::max(report.max_grid_h, h_at(beta));

    const double lo = std::log(grid.beta0 / 10.0);
    const double hi = std::log(10.0 * grid.beta_max());
    report.max_dense_h = NEG_INF;
    for (int i = 0; i < n_dense; i++) {
        double beta = std::exp(lo + (hi - lo) * i / (n_dense - 1));
        report.max_dense_h = std::max(report.max_dense_h, h_at(beta));
    }

    const double g0 = risk_neutral_solve(model, solver).objective;
    const double g_beta0 = erm_solve_auto(model, grid.beta0, solver).objective;
    report.tolerance = grid.delta + std::max(0.0, g0 - g_beta0);
    report.gap = report.max_dense_h - report.max_grid_h;
    report.pass = report.gap <= report.tolerance;
    return report;
}

namespace {

/// -beta^{-1} log(alpha^{-1} mean exp(-beta x)), stable for any beta > 0.
double sample_objective(const numvec& xs, double alpha, double beta) {
    numvec terms;
    terms.reserve(xs.size());
    for (double x : xs) terms.push_back(-beta * x);
    double lse = log_sum_exp(terms) - std::log(static_cast<double>(xs.size()));
    return -(lse - std::log(alpha)) / beta;
}

}  // namespace

SampleEvar evar_of_samples(const numvec& returns, double alpha) {
    if (returns.empty()) throw std::invalid_argument("empty sample");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");

    const double lo_val = *std::min_element(returns.begin(), returns.end());
    const double hi_val = *std::max_element(returns.begin(), returns.end());
    if (lo_val == hi_val) return {lo_val, POS_INF, false};

    auto f = [&](double beta) { return sample_objective(returns, alpha, beta); };

    // expand the right end until the objective decreases there; the supremum
    // may be at the boundary, in which case the endpoint value is returned
    double lo = 1e-8;
    double hi = 1.0;
    bool boundary = false;
    constexpr double BETA_CAP = 1e18;
    while (f(2.0 * hi) > f(hi)) {
        hi *= 2.0;
        if (hi >= BETA_CAP) {
            boundary = true;
            break;
        }
    }
    if (boundary) return {f(hi), hi, true};
    hi *= 2.0;

    // golden-section: the objective is unimodal (concave in 1/beta)
    constexpr double INVPHI = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - INVPHI * (b - a);
    double d = a + INVPHI * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-10 * std::max(1.0, std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    double beta_star = 0.5 * (a + b);
    return {f(beta_star), beta_star, false};
}

}  // namespace rmdp
