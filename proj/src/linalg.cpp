#include "drtsoh/linalg.hpp"

#include <cmath>
#include <string>

#include "drtsoh/errors.hpp"
#include "drtsoh/parallel.hpp"

namespace drtsoh::linalg {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

Vector matvec_serial(const Matrix& a, std::span<const double> x) {
    Vector y(a.rows());
    par::serial_for(a.rows(), [&](std::size_t i) { y[i] = dot(a.row(i), x); });
    return y;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    Vector y(a.rows());
    par::parallel_for(a.rows(), [&](std::size_t i) { y[i] = dot(a.row(i), x); });
    return y;
}

namespace {

double column_dot(const Matrix& a, std::size_t j, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * x[i];
    return s;
}

double column_column_dot(const Matrix& a, std::size_t j, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, k);
    return s;
}

} // namespace

Vector matvec_transpose_serial(const Matrix& a, std::span<const double> x) {
    Vector y(a.cols());
    par::serial_for(a.cols(), [&](std::size_t j) { y[j] = column_dot(a, j, x); });
    return y;
}

Vector matvec_transpose(const Matrix& a, std::span<const double> x) {
    Vector y(a.cols());
    par::parallel_for(a.cols(), [&](std::size_t j) { y[j] = column_dot(a, j, x); });
    return y;
}

Matrix gram_serial(const Matrix& a) {
    const std::size_t n = a.cols();
    Matrix g(n, n);
    par::serial_for(n, [&](std::size_t j) {
        for (std::size_t k = j; k < n; ++k) {
            const double v = column_column_dot(a, j, k);
            g(j, k) = v;
            g(k, j) = v;
        }
    });
    return g;
}

Matrix gram(const Matrix& a) {
    const std::size_t n = a.cols();
    Matrix g(n, n);
    par::parallel_for(n, [&](std::size_t j) {
        for (std::size_t k = j; k < n; ++k) {
            const double v = column_column_dot(a, j, k);
            g(j, k) = v;
            g(k, j) = v;
        }
    });
    return g;
}

Cholesky::Cholesky(const Matrix& spd) : l_(spd.rows(), spd.cols()) {
    const std::size_t n = spd.rows();
    if (spd.cols() != n) throw ArgumentError("cholesky: matrix must be square");
    for (std::size_t j = 0; j < n; ++j) {
        double d = spd(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
        if (!(d > 0.0)) {
            throw NumericError("cholesky: non-positive pivot at index " + std::to_string(j));
        }
        const double ljj = std::sqrt(d);
        l_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = spd(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
            l_(i, j) = s / ljj;
        }
    }
}

Vector Cholesky::solve(std::span<const double> b) const {
    const std::size_t n = l_.rows();
    if (b.size() != n) throw ArgumentError("cholesky solve: dimension mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * y[k];
        y[i] = s / l_(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
        x[ii] = s / l_(ii, ii);
    }
    return x;
}

Vector solve_spd(const Matrix& spd, std::span<const double> b) {
    const Cholesky ch(spd);
    Vector x = ch.solve(b);
    // one refinement pass keeps the residual near machine precision even for
    // ill-conditioned systems
    Vector r(b.size());
    for (std::size_t i = 0; i < spd.rows(); ++i) r[i] = b[i] - dot(spd.row(i), x);
    const Vector dx = ch.solve(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    return x;
}

} // namespace drtsoh::linalg
