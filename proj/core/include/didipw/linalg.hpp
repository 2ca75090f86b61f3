#pragma once

#include <cstddef>
#include <vector>

namespace didipw {

// Dense row-major matrix, just enough for probit design matrices and the
// Newton step. Sized n-by-p with p small (covariates + intercept).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    const double* row(std::size_t i) const noexcept { return data_.data() + i * cols_; }
    double* row(std::size_t i) noexcept { return data_.data() + i * cols_; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// In-place Cholesky factorization of a symmetric positive-definite p-by-p
// matrix stored row-major in `a`. Returns false if a non-positive pivot is
// hit (singular or indefinite input).
bool cholesky_factor(std::vector<double>& a, std::size_t p);

// Solves L L^T x = b given the factor from cholesky_factor; overwrites b.
void cholesky_solve(const std::vector<double>& l, std::size_t p, std::vector<double>& b);

// Solves A x = b for symmetric positive-definite A (copy of A is factored).
// Throws EstimationError on a singular system.
std::vector<double> solve_spd(std::vector<double> a, std::size_t p, std::vector<double> b);

// Inverse of a symmetric positive-definite matrix, column-by-column solve.
std::vector<double> invert_spd(const std::vector<double>& a, std::size_t p);

} // namespace didipw
