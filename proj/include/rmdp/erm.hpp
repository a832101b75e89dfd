#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "rmdp/model.hpp"
#include "rmdp/types.hpp"

namespace rmdp {

/// The transformed value vector w = -exp(-beta * v). Strictly negative for
/// any finite ERM value; iterates of optimistic value iteration stay <= 0.
struct ExponentialValueFunction {
    numvec w;
    double beta = 0.0;
};

/// ERM value vector; -inf marks unbounded-below states, +inf can only arise
/// from degenerate inputs (w = 0) that valid solves never produce.
struct ValueFunction {
    numvec v;
    double beta = 0.0;
};

enum class SolveStatus { Bounded, Unbounded, MaxIterations };
enum class SolveMethod { VI, PI, LP, RiskNeutral };

struct UnboundedWitness {
    indvec policy;   // deterministic rule with rho(B^d) >= 1
    double radius;   // capped at 1e300 when the true radius overflows
};

struct SolveReport {
    SolveMethod method = SolveMethod::VI;
    SolveStatus status = SolveStatus::MaxIterations;
    double beta = 0.0;
    double objective = NEG_INF;  // g aggregated over the initial distribution
    ValueFunction value;
    ExponentialValueFunction exp_value;  // empty when w is not representable
    DecisionRule policy;
    indvec policy_actions;
    double residual = POS_INF;
    long iterations = 0;
    numvec trace;  // per-iteration residuals when collected
    std::optional<UnboundedWitness> witness;
};

struct SolveOptions {
    double tol = 1e-10;
    long max_iter = 1'000'000;
    double divergence_floor = -1e150;
    int radius_check_every = 100;
    bool collect_trace = true;
    /// Observer invoked with every iterate (testing hook).
    std::function<void(const numvec&)> on_iterate;
};

std::string to_string(SolveStatus status);
std::string to_string(SolveMethod method);

/// L^d w = B w - b as a plain dense mat-vec.
numvec exp_bellman_apply(const ExponentialMatrices& mats, const numvec& w);

/// L* w: per-state maximum over actions of (B^a w - b^a), with the greedy
/// deterministic rule. Ties break toward the smallest action id.
std::pair<numvec, DecisionRule> exp_bellman_optimal(const TransientMdp& model, double beta,
                                                    const numvec& w);

/// Optimistic value iteration w^{k+1} = L* w^k from w^0 = 0. Iterates are
/// componentwise non-increasing; divergence is flagged when w breaches the
/// floor or the greedy rule certifies rho(B^d) >= 1 while the residual has
/// stopped shrinking.
SolveReport value_iteration(const TransientMdp& model, double beta,
                            const SolveOptions& opts = {});

/// Solves (I - B^d) w = -b^d after certifying rho(B^d) < 1; equals the limit
/// of repeated L^d application.
ExponentialValueFunction policy_evaluation_exact(const TransientMdp& model,
                                                 const DecisionRule& rule, double beta);

/// Alternates exact evaluation and greedy improvement until the greedy rule
/// repeats. Without an explicit init, starts from the rule greedy at w = 0,
/// falling back to value iteration when that rule fails the radius test.
SolveReport policy_iteration(const TransientMdp& model, double beta,
                             std::optional<DecisionRule> init = std::nullopt,
                             const SolveOptions& opts = {});

/// min 1^T w subject to w >= -b^a + B^a w for every state-action row, solved
/// by the dense simplex; an unbounded program maps to SolveStatus::Unbounded.
SolveReport lp_solve(const TransientMdp& model, double beta, const SolveOptions& opts = {});

/// Backward recursion w^t = L* w^{t-1} from w^0 = -z (z defaults to ones).
/// Returns w^0..w^T and the greedy rule of every application; rules[k] maps
/// w^k to w^{k+1}, so the executable Markov policy for horizon T plays the
/// rules in reverse order.
std::pair<std::vector<ExponentialValueFunction>, std::vector<DecisionRule>> finite_horizon_solve(
    const TransientMdp& model, double beta, int horizon, const numvec& terminal_z = {});

/// Expected-value total-reward solver (the beta = 0 border case): policy
/// iteration on (P, r) with exact evaluations.
SolveReport risk_neutral_solve(const TransientMdp& model, const SolveOptions& opts = {});

/// v = -beta^{-1} log(-w) elementwise; w = 0 maps to +inf. Positive w is a
/// contract violation.
ValueFunction erm_from_exponential(const ExponentialValueFunction& wvf);

/// ERM of the per-state values under the initial distribution: the scalar
/// objective g. For beta = 0 this is the plain expectation.
double aggregate_initial(const ValueFunction& value, const numvec& mu, double beta);

/// Log-domain value iteration on v directly (log-sum-exp Bellman backups).
/// Mathematically the same iterates as value_iteration, but stable at any
/// beta; used for risk levels where w-space arithmetic over- or underflows.
SolveReport erm_solve_logspace(const TransientMdp& model, double beta,
                               const SolveOptions& opts = {});

/// w-space arithmetic is trusted while beta * max|r| stays within this
/// budget; beyond it the stable log-domain path takes over.
constexpr double LOGSPACE_EXPONENT_BUDGET = 35.0;

/// Below this beta the w-space residual tolerance is beta-compressed
/// (dw = beta * |w| * dv), so value iteration delegates to the log-domain
/// backend, which measures convergence on v directly.
constexpr double WSPACE_MIN_BETA = 1e-2;

/// LP for moderate beta, log-domain VI past the exponent budget.
SolveReport erm_solve_auto(const TransientMdp& model, double beta,
                           const SolveOptions& opts = {});

}  // namespace rmdp
