#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drtsoh::linalg {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// y = A x. The OpenMP version parallelizes over rows; each row is a serial
// dot product, so serial and parallel results are bitwise identical.
Vector matvec_serial(const Matrix& a, std::span<const double> x);
Vector matvec(const Matrix& a, std::span<const double> x);

// y = A^T x (parallel over output entries).
Vector matvec_transpose_serial(const Matrix& a, std::span<const double> x);
Vector matvec_transpose(const Matrix& a, std::span<const double> x);

// G = A^T A, symmetric cols x cols. Each entry is an independent column dot.
Matrix gram_serial(const Matrix& a);
Matrix gram(const Matrix& a);

/// Cholesky factorization of a symmetric positive definite matrix.
/// Throws NumericError when a pivot is not strictly positive.
class Cholesky {
public:
    explicit Cholesky(const Matrix& spd);
    Vector solve(std::span<const double> b) const;
    const Matrix& factor() const { return l_; }

private:
    Matrix l_; // lower triangular
};

/// SPD solve with one iterative-refinement pass.
Vector solve_spd(const Matrix& spd, std::span<const double> b);

} // namespace drtsoh::linalg
