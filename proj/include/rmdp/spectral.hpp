#pragma once

#include <functional>
#include <optional>

#include "rmdp/model.hpp"

namespace rmdp {

struct SpectralOptions {
    double tol = 1e-9;
    int power_iterations = 10000;
    int bisection_iterations = 200;
};

/// Spectral radius of a nonnegative square matrix, certified to `tol`.
///
/// Primary method: power iteration tracking Collatz-Wielandt min/max ratio
/// bounds. When the gap stalls (reducible or defective dominant eigenvalue),
/// bisection on the Perron root refines the bracket using the inverse-
/// positivity certificate for lambda*I - M.
double spectral_radius(const Matrix& m, const SpectralOptions& opts = {});

/// log(rho(B^d)) for the exponential matrix of a rule, computed with a
/// uniform exponent shift so it stays finite at any beta. Sink columns do not
/// enter B, so only non-sink targets matter.
double log_spectral_radius_exponential(const TransientMdp& model, const DecisionRule& rule,
                                       double beta);

struct TransienceVerdict {
    bool transient;
    double radius;                          // rho of the worst policy examined
    std::optional<indvec> violating_policy;  // deterministic rule with rho >= 1
    long long policies_checked = 0;
};

/// Lemma-style check of a single rule: transient iff rho(P^d) < 1 - tol_margin.
TransienceVerdict check_transient_policy(const TransientMdp& model, const DecisionRule& rule,
                                         double tol_margin = 1e-10);

/// Enumerates every deterministic rule (product of per-state action sets) and
/// conjoins the per-policy checks. Throws BudgetExceededError when the count
/// exceeds `cap`.
TransienceVerdict check_transient_exhaustive(const TransientMdp& model,
                                             long long cap = 1'000'000,
                                             double tol_margin = 1e-10);

/// Number of deterministic rules, saturating at cap+1.
long long count_deterministic_rules(const TransientMdp& model, long long cap);

/// Visits every deterministic rule (as action ids per state) until the
/// callback returns false.
void for_each_deterministic_rule(const TransientMdp& model,
                                 const std::function<bool(const indvec&)>& visit);

}  // namespace rmdp
