#pragma once

#include "rmdp/types.hpp"

namespace rmdp {

/// Dense row-major matrix. Problem sizes here are small (S up to a few
/// thousand), so there is no sparse variant.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; i++) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    numvec multiply(const numvec& x) const;

    double min_entry() const;
    double max_entry() const;

private:
    int rows_ = 0, cols_ = 0;
    numvec data_;
};

/// In-place LU factorization with partial pivoting. Returns false when a
/// pivot is smaller than `pivot_tol` (treated as singular).
bool lu_factor(Matrix& a, std::vector<int>& perm, double pivot_tol = 1e-300);

numvec lu_solve(const Matrix& lu, const std::vector<int>& perm, const numvec& rhs);

/// Solves a * x = rhs; throws SingularSystemError on failure.
numvec solve_linear(Matrix a, const numvec& rhs);

}  // namespace rmdp
