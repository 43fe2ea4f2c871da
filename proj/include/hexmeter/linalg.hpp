#pragma once

// Dense row-major matrices and the symmetric positive-definite routines the
// novelty pipeline needs. Sizes here are small (16 x 16), so nothing is blocked.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hexmeter {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, std::span<const double> x);

// Largest absolute entry of a - b.
double max_abs_diff(const Matrix& a, const Matrix& b);

// Lower-triangular L with a = L L^T, or nullopt if a pivot is not positive.
std::optional<Matrix> cholesky(const Matrix& a);

// Solves L y = b for lower-triangular L.
std::vector<double> forward_substitute(const Matrix& lower, std::span<const double> b);

struct SpdInverse {
    Matrix inverse;   // (a + ridge I)^-1, exactly symmetric
    Matrix cholesky;  // factor of a + ridge I
    double ridge = 0.0;
};

// Inverts a symmetric matrix through its Cholesky factor. When the factor
// fails, or the inverse misses ||X (a + ridge I) - I||_inf <= 1e-8, a ridge
// from {1e-10, 1e-8, 1e-6, 1e-4, 1e-2} is added. Throws NumericalError when
// even 1e-2 does not help.
SpdInverse invert_spd(const Matrix& a);

inline constexpr double kInverseTolerance = 1e-8;

}  // namespace hexmeter
