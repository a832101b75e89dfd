#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmdp {

using numvec = std::vector<double>;
using indvec = std::vector<int>;

constexpr double NEG_INF = -std::numeric_limits<double>::infinity();
constexpr double POS_INF = std::numeric_limits<double>::infinity();

/// Probability mass / distribution comparisons use this tolerance throughout.
constexpr double MASS_TOL = 1e-12;

/// Largest exponent fed to std::exp; beyond this the result is reported as an
/// unbounded-risk diagnostic instead of silently producing inf.
constexpr double EXP_OVERFLOW_LIMIT = 700.0;

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when exp(-beta * r) would overflow for some transition.
struct UnboundedRiskError : SolverError {
    int state, action, next;
    UnboundedRiskError(int s, int a, int s_next, double exponent)
        : SolverError("exp overflow (exponent " + std::to_string(exponent) +
                      ") at transition (" + std::to_string(s) + "," + std::to_string(a) +
                      "," + std::to_string(s_next) + ")"),
          state(s), action(a), next(s_next) {}
};

/// Raised by exact policy evaluation when rho(B^d) >= 1.
struct UnboundedPolicyError : SolverError {
    double radius;
    explicit UnboundedPolicyError(double rho)
        : SolverError("policy has unbounded ERM return: rho(B) = " + std::to_string(rho)),
          radius(rho) {}
};

struct SingularSystemError : SolverError {
    using SolverError::SolverError;
};

struct BudgetExceededError : SolverError {
    using SolverError::SolverError;
};

struct IterationCapError : SolverError {
    using SolverError::SolverError;
};

/// log(sum_i exp(x[i])) with the usual max shift. Empty input or all -inf
/// yields -inf.
inline double log_sum_exp(const numvec& xs) {
    double m = NEG_INF;
    for (double x : xs)
        if (x > m) m = x;
    if (m == NEG_INF) return NEG_INF;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - m);
    return m + std::log(acc);
}

inline double inf_norm_diff(const numvec& a, const numvec& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); i++) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace rmdp
