#pragma once

#include "rmdp/matrix.hpp"
#include "rmdp/types.hpp"

namespace rmdp {

enum class LpStatus { Optimal, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status;
    numvec x;
    double objective;
    long pivots;
};

/// Solves min c^T x subject to A x <= b with x free, by a dense full-tableau
/// simplex with Bland's rule. Requires b >= 0, which makes the slack basis
/// feasible and removes the need for a phase-1 start. Free variables are
/// split into positive and negative parts internally.
LpResult simplex_free_min(const numvec& c, const Matrix& a, const numvec& b,
                          long max_pivots = 200000);

}  // namespace rmdp
