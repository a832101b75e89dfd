#pragma once

#include "rmdp/erm.hpp"
#include "rmdp/model.hpp"

namespace rmdp {

/// The discretized risk-level ladder: strictly increasing betas whose
/// reciprocal spacing satisfies (1/b_{k+1} - 1/b_k) * log(alpha) = delta,
/// ending exactly at -log(alpha) / delta.
struct BetaGrid {
    double alpha;
    double delta;
    double beta0;
    numvec betas;

    double beta_max() const { return -std::log(alpha) / delta; }
};

/// Requires 0 < beta0 < -log(alpha)/delta; otherwise instructs the caller to
/// shrink beta0 or enlarge delta.
BetaGrid build_beta_grid(double alpha, double delta, double beta0);

/// h(g, beta) = g + log(alpha) / beta; -inf propagates.
double h_value(double g, double beta, double alpha);

struct EvarOptions {
    SolveOptions solver;
    int max_halvings = 200;
};

/// Halves beta0 from the grid endpoint until g*(0) - g*(beta0) <= delta.
/// Throws IterationCapError past max_halvings.
double find_beta0(const TransientMdp& model, double alpha, double delta,
                  const EvarOptions& opts = {});

struct PerBetaEntry {
    double beta;
    double g_star;  // optimal ERM value at this beta (-inf when unbounded)
    double h_star;
    SolveStatus status;
};

struct EvarSolution {
    double alpha;
    double delta;
    double beta0;
    double beta_star;    // grid point attaining the maximum of h
    double evar_lower;   // h at (pi*, beta*): a valid lower bound on the optimum
    indvec policy_actions;
    DecisionRule policy;
    std::vector<PerBetaEntry> per_beta;
    int beta0_halvings = 0;
};

/// Reduction of the EVaR objective to a sweep of ERM solves over the beta
/// grid; the returned value is within delta of the optimum. Unbounded grid
/// points stay in the table with h = -inf; only an all-unbounded sweep fails.
EvarSolution evar_solve(const TransientMdp& model, double alpha, double delta,
                        const EvarOptions& opts = {});

struct AuditReport {
    double max_grid_h;
    double max_dense_h;
    double gap;        // max over dense samples minus max over the grid
    double tolerance;  // delta + max(0, g*(0) - g*(beta0))
    bool pass;
    int n_dense;
};

/// Samples h*(beta) on a dense log-spaced ladder spanning (beta0/10,
/// 10*beta_max) and compares against the grid maximum.
AuditReport grid_error_audit(const TransientMdp& model, const BetaGrid& grid, int n_dense,
                             const EvarOptions& opts = {});

struct SampleEvar {
    double value;
    double beta;
    bool at_boundary;  // supremum ran into the bracket endpoint
};

/// Static EVaR of an empirical distribution: maximizes
/// -beta^{-1} log(alpha^{-1} mean exp(-beta x)) by bracketed golden-section
/// search (the objective is unimodal in 1/beta).
SampleEvar evar_of_samples(const numvec& returns, double alpha);

}  // namespace rmdp
