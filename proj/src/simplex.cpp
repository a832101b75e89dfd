#include "rmdp/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace rmdp {

namespace {
constexpr double COST_EPS = 1e-10;
constexpr double PIVOT_EPS = 1e-11;
}  // namespace

LpResult simplex_free_min(const numvec& c, const Matrix& a, const numvec& b, long max_pivots) {
    const int m = a.rows();
    const int nf = a.cols();
    if (static_cast<int>(c.size()) != nf || static_cast<int>(b.size()) != m)
        throw std::invalid_argument("simplex dimension mismatch");
    for (double v : b)
        if (v < 0.0) throw std::invalid_argument("simplex requires b >= 0");

    const int ncols = 2 * nf + m;  // u, v, slack
    // tableau rows 0..m-1: constraints; row m: reduced costs; last column: rhs
    std::vector<numvec> t(m + 1, numvec(ncols + 1, 0.0));
    std::vector<int> basis(m);

    for (int i = 0; i < m; i++) {
        for (int j = 0; j < nf; j++) {
            t[i][j] = a(i, j);
            t[i][nf + j] = -a(i, j);
        }
        t[i][2 * nf + i] = 1.0;
        t[i][ncols] = b[i];
        basis[i] = 2 * nf + i;
    }
    for (int j = 0; j < nf; j++) {
        t[m][j] = c[j];
        t[m][nf + j] = -c[j];
    }

    long pivots = 0;
    while (pivots < max_pivots) {
        // Bland: entering variable is the smallest index with negative reduced cost
        int enter = -1;
        for (int j = 0; j < ncols; j++) {
            if (t[m][j] < -COST_EPS) {
                enter = j;
                break;
            }
        }
        if (enter < 0) {
            numvec x(nf, 0.0);
            for (int i = 0; i < m; i++) {
                if (basis[i] < nf)
                    x[basis[i]] += t[i][ncols];
                else if (basis[i] < 2 * nf)
                    x[basis[i] - nf] -= t[i][ncols];
            }
            return {LpStatus::Optimal, std::move(x), -t[m][ncols], pivots};
        }

        int leave = -1;
        double best_ratio = POS_INF;
        for (int i = 0; i < m; i++) {
            if (t[i][enter] > PIVOT_EPS) {
                double ratio = t[i][ncols] / t[i][enter];
                if (ratio < best_ratio - PIVOT_EPS ||
                    (ratio < best_ratio + PIVOT_EPS &&
                     (leave < 0 || basis[i] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) return {LpStatus::Unbounded, {}, NEG_INF, pivots};

        const double pivot = t[leave][enter];
        for (int j = 0; j <= ncols; j++) t[leave][j] /= pivot;
        for (int i = 0; i <= m; i++) {
            if (i == leave) continue;
            double f = t[i][enter];
            if (f == 0.0) continue;
            for (int j = 0; j <= ncols; j++) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
        pivots++;
    }
    return {LpStatus::IterationLimit, {}, 0.0, pivots};
}

}  // namespace rmdp
