#include "hexmeter/linalg.hpp"

#include "hexmeter/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace hexmeter {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        out[i] = s;
    }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    }
    return m;
}

std::optional<Matrix> cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

std::vector<double> forward_substitute(const Matrix& lower, std::span<const double> b) {
    const std::size_t n = lower.rows();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
        y[i] = s / lower(i, i);
    }
    return y;
}

namespace {

// (L L^T)^-1 = L^-T L^-1, solved column by column.
Matrix inverse_from_cholesky(const Matrix& l) {
    const std::size_t n = l.rows();
    Matrix inv(n, n);
    std::vector<double> e(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::fill(e.begin(), e.end(), 0.0);
        e[c] = 1.0;
        std::vector<double> y = forward_substitute(l, e);
        // back substitution with L^T
        for (std::size_t ii = n; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * y[k];
            y[ii] = s / l(ii, ii);
        }
        for (std::size_t r = 0; r < n; ++r) inv(r, c) = y[r];
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = avg;
            inv(j, i) = avg;
        }
    }
    return inv;
}

}  // namespace

SpdInverse invert_spd(const Matrix& a) {
    if (a.rows() != a.cols()) throw NumericalError("invert_spd: matrix is not square");
    const std::size_t n = a.rows();
    static constexpr std::array<double, 6> ladder{0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2};
    for (double ridge : ladder) {
        Matrix shifted = a;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) += ridge;
        auto l = cholesky(shifted);
        if (!l) continue;
        Matrix inv = inverse_from_cholesky(*l);
        if (max_abs_diff(multiply(inv, shifted), Matrix::identity(n)) > kInverseTolerance) continue;
        return {std::move(inv), std::move(*l), ridge};
    }
    throw NumericalError("covariance matrix is singular even with ridge 1e-2; "
                         "remove perfectly collinear features");
}

}  // namespace hexmeter
