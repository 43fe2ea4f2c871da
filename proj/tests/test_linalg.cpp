#include <doctest.h>

#include "hexmeter/error.hpp"
#include "hexmeter/linalg.hpp"
#include "support.hpp"

#include <cmath>

using namespace hexmeter;

namespace {

// Gauss-Jordan elimination with partial pivoting.
Matrix gauss_jordan_inverse(Matrix a) {
    const std::size_t n = a.rows();
    Matrix inv = Matrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
        }
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(a(c, j), a(p, j));
            std::swap(inv(c, j), inv(p, j));
        }
        const double d = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a(r, c);
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

double residual(const Matrix& inv, const Matrix& a, double ridge) {
    Matrix shifted = a;
    for (std::size_t i = 0; i < a.rows(); ++i) shifted(i, i) += ridge;
    return max_abs_diff(multiply(inv, shifted), Matrix::identity(a.rows()));
}

}  // namespace

TEST_CASE("identity and diagonal") {
    auto r = invert_spd(Matrix::identity(16));
    CHECK(r.ridge == 0.0);
    CHECK(r.inverse == Matrix::identity(16));

    Matrix d = Matrix::identity(16);
    d(0, 0) = 4.0;
    r = invert_spd(d);
    CHECK(r.ridge == 0.0);
    CHECK(r.inverse(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.inverse(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("random SPD matrices agree with Gauss-Jordan") {
    hexmeter::Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = testing::random_spd(16, rng);
        const auto r = invert_spd(a);
        CHECK(r.ridge == 0.0);
        CHECK(max_abs_diff(r.inverse, gauss_jordan_inverse(a)) < 1e-8);
        CHECK(residual(r.inverse, a, r.ridge) <= kInverseTolerance);
        for (std::size_t i = 0; i < 16; ++i) {
            for (std::size_t j = 0; j < 16; ++j) CHECK(r.inverse(i, j) == r.inverse(j, i));
        }
    }
}

TEST_CASE("duplicated column needs a ridge") {
    hexmeter::Rng rng(3);
    Matrix x(200, 16);
    for (std::size_t r = 0; r < 200; ++r) {
        for (std::size_t c = 0; c < 15; ++c) x(r, c) = rng.uniform();
        x(r, 15) = x(r, 3);
    }
    // covariance by hand
    Matrix cov(16, 16);
    std::vector<double> mu(16, 0.0);
    for (std::size_t r = 0; r < 200; ++r) {
        for (std::size_t c = 0; c < 16; ++c) mu[c] += x(r, c) / 200.0;
    }
    for (std::size_t r = 0; r < 200; ++r) {
        for (std::size_t i = 0; i < 16; ++i) {
            for (std::size_t j = 0; j < 16; ++j) cov(i, j) += (x(r, i) - mu[i]) * (x(r, j) - mu[j]) / 199.0;
        }
    }
    const auto inv = invert_spd(cov);
    CHECK(inv.ridge > 0.0);
    CHECK(residual(inv.inverse, cov, inv.ridge) <= kInverseTolerance);
}

TEST_CASE("hopeless matrices throw") {
    Matrix m(3, 3, 0.0);
    m(0, 0) = -1.0;
    CHECK_THROWS_AS(invert_spd(m), NumericalError);
}

TEST_CASE("cholesky and substitution") {
    Matrix a(2, 2);
    a(0, 0) = 4;
    a(0, 1) = a(1, 0) = 2;
    a(1, 1) = 3;
    const auto l = cholesky(a);
    REQUIRE(l);
    CHECK((*l)(0, 0) == doctest::Approx(2.0));
    CHECK((*l)(1, 0) == doctest::Approx(1.0));
    CHECK((*l)(1, 1) == doctest::Approx(std::sqrt(2.0)));
    const auto y = forward_substitute(*l, std::vector<double>{2.0, 1.0 + std::sqrt(2.0)});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));

    Matrix neg = Matrix::identity(2);
    neg(1, 1) = -1;
    CHECK_FALSE(cholesky(neg));
}
