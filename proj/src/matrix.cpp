#include "rmdp/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace rmdp {

numvec Matrix::multiply(const numvec& x) const {
    numvec y(rows_, 0.0);
    for (int r = 0; r < rows_; r++) {
        const double* row = data_.data() + static_cast<size_t>(r) * cols_;
        double acc = 0.0;
        for (int c = 0; c < cols_; c++) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

double Matrix::min_entry() const {
    double m = POS_INF;
    for (double v : data_) m = std::min(m, v);
    return data_.empty() ? 0.0 : m;
}

double Matrix::max_entry() const {
    double m = NEG_INF;
    for (double v : data_) m = std::max(m, v);
    return data_.empty() ? 0.0 : m;
}

bool lu_factor(Matrix& a, std::vector<int>& perm, double pivot_tol) {
    const int n = a.rows();
    perm.resize(n);
    for (int i = 0; i < n; i++) perm[i] = i;

    for (int col = 0; col < n; col++) {
        int pivot = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; r++) {
            double v = std::abs(a(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (!(best > pivot_tol)) return false;
        if (pivot != col) {
            for (int c = 0; c < n; c++) std::swap(a(col, c), a(pivot, c));
            std::swap(perm[col], perm[pivot]);
        }
        const double d = a(col, col);
        for (int r = col + 1; r < n; r++) {
            double f = a(r, col) / d;
            a(r, col) = f;
            for (int c = col + 1; c < n; c++) a(r, c) -= f * a(col, c);
        }
    }
    return true;
}

numvec lu_solve(const Matrix& lu, const std::vector<int>& perm, const numvec& rhs) {
    const int n = lu.rows();
    numvec x(n);
    for (int i = 0; i < n; i++) x[i] = rhs[perm[i]];
    // forward substitution (unit lower triangle)
    for (int i = 1; i < n; i++) {
        double acc = x[i];
        for (int j = 0; j < i; j++) acc -= lu(i, j) * x[j];
        x[i] = acc;
    }
    // back substitution
    for (int i = n - 1; i >= 0; i--) {
        double acc = x[i];
        for (int j = i + 1; j < n; j++) acc -= lu(i, j) * x[j];
        x[i] = acc / lu(i, i);
    }
    return x;
}

numvec solve_linear(Matrix a, const numvec& rhs) {
    std::vector<int> perm;
    if (!lu_factor(a, perm)) throw SingularSystemError("linear system is singular");
    return lu_solve(a, perm, rhs);
}

}  // namespace rmdp
