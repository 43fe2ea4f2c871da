#include <doctest.h>

#include "hexmeter/error.hpp"
#include "hexmeter/stats.hpp"
#include "support.hpp"

#include <cmath>

using namespace hexmeter;

namespace {

// P(chi^2_df > x) by integrating the density over [x, x + 800] with
// 20-point Gauss-Legendre on panels of width 0.125.
double chi2_sf_oracle(double x, int df) {
    static const double nodes[10] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                                     0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                                     0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
                                     0.9931285991850949};
    static const double weights[10] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
                                       0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
                                       0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
                                       0.0176140071391521};
    const double k = df / 2.0;
    const double log_norm = -k * std::log(2.0) - std::lgamma(k);
    auto pdf = [&](double t) { return std::exp(log_norm + (k - 1.0) * std::log(t) - t / 2.0); };
    const double h = 0.125;
    double total = 0.0;
    for (double a = x; a < x + 800.0; a += h) {
        const double mid = a + h / 2.0, half = h / 2.0;
        double s = 0.0;
        for (int i = 0; i < 10; ++i) s += weights[i] * (pdf(mid - half * nodes[i]) + pdf(mid + half * nodes[i]));
        total += s * half;
    }
    return total;
}

// Column means and covariance by the textbook two-pass formula.
MeanCovariance two_pass(const Matrix& x) {
    const std::size_t n = x.rows(), d = x.cols();
    MeanCovariance out{std::vector<double>(d, 0.0), Matrix(d, d)};
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) out.mean[c] += x(r, c);
    }
    for (double& m : out.mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += (x(r, i) - out.mean[i]) * (x(r, j) - out.mean[j]);
            out.covariance(i, j) = s / static_cast<double>(n - 1);
        }
    }
    return out;
}

TargetDistribution two_feature_target() {
    Matrix cov(2, 2);
    cov(0, 0) = cov(1, 1) = 1.0;
    cov(0, 1) = cov(1, 0) = 0.5;
    return make_target({0.0, 0.0}, cov, 1);
}

}  // namespace

TEST_CASE("chi-square survival function matches the quadrature oracle") {
    hexmeter::Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const int df = 1 + static_cast<int>(rng.below(30));
        const double x = 0.5 + rng.uniform() * 79.5;
        CAPTURE(df);
        CAPTURE(x);
        CHECK(std::abs(chi2_sf(x, df) - chi2_sf_oracle(x, df)) <= 1e-9);
    }
}

TEST_CASE("chi-square reference values") {
    for (int k = 1; k <= 30; ++k) CHECK(chi2_sf(0.0, k) == 1.0);
    CHECK(std::abs(chi2_sf(36.82, 15) - 0.0013) <= 0.0002);
    CHECK(std::abs(chi2_sf(39.36, 15) - 0.0006) <= 0.0002);
    CHECK(std::abs(chi2_sf(15.88, 15) - 0.39) <= 0.01);
    CHECK(chi2_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("chi-square survival function is decreasing") {
    for (int df : {1, 2, 15, 16, 40}) {
        double prev = 1.0;
        for (double x = 0.25; x < 120.0; x += 0.25) {
            const double p = chi2_sf(x, df);
            CHECK(p <= prev);
            if (prev < 1.0 && prev > 0.0) CHECK(p < prev);
            CHECK(p >= 0.0);
            prev = p;
            if (p == 0.0) break;
        }
    }
}

TEST_CASE("mean and covariance") {
    Matrix two(2, 16);
    two(1, 0) = 2.0;
    const auto mc = mean_and_covariance(two);
    CHECK(mc.mean[0] == 1.0);
    CHECK(mc.covariance(0, 0) == 2.0);
    for (std::size_t i = 0; i < 16; ++i) {
        for (std::size_t j = 0; j < 16; ++j) {
            if (i || j) CHECK(mc.covariance(i, j) == 0.0);
        }
    }

    Matrix same(5, 16, 0.3);
    const auto z = mean_and_covariance(same);
    CHECK(max_abs_diff(z.covariance, Matrix(16, 16)) < 1e-15);

    hexmeter::Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix x(5 + trial * 10, 16);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < 16; ++c) x(r, c) = rng.uniform() * 3.0 - 1.0;
        }
        const auto fast = mean_and_covariance(x);
        const auto slow = two_pass(x);
        for (std::size_t c = 0; c < 16; ++c) CHECK(std::abs(fast.mean[c] - slow.mean[c]) <= 1e-12);
        CHECK(max_abs_diff(fast.covariance, slow.covariance) <= 1e-12);
    }
    CHECK_THROWS_AS(mean_and_covariance(Matrix(1, 16)), DataError);
}

TEST_CASE("Mahalanobis distance and contributions") {
    const auto t = two_feature_target();
    const std::vector<double> x{1.0, 1.0};
    CHECK(mahalanobis_sq(x, t) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    const auto c = contribution_vector(x, t);
    CHECK(std::abs(c[0] + c[1] - 4.0 / 3.0) <= 1e-12);
    CHECK(mahalanobis_sq(std::vector<double>{0.0, 0.0}, t) == 0.0);
    for (double v : contribution_vector(std::vector<double>{0.0, 0.0}, t)) CHECK(v == 0.0);

    const auto id = make_target(std::vector<double>(16, 0.5), Matrix::identity(16), 15);
    std::vector<double> y(16);
    double euclid = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
        y[i] = 0.5 + 0.1 * static_cast<double>(i);
        euclid += (y[i] - 0.5) * (y[i] - 0.5);
    }
    CHECK(mahalanobis_sq(y, id) == doctest::Approx(euclid).epsilon(1e-14));
    const auto cy = contribution_vector(y, id);
    for (std::size_t i = 0; i < 16; ++i) CHECK(cy[i] == doctest::Approx((y[i] - 0.5) * (y[i] - 0.5)));

    // A negative contribution: the second feature lags its correlated partner.
    const auto neg = contribution_vector(std::vector<double>{1.0, 0.2}, t);
    CHECK(neg[1] < 0.0);
}

TEST_CASE("contributions sum to the distance on fuzzed inputs") {
    hexmeter::Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const Matrix cov = testing::random_spd(16, rng, 0.01 + rng.uniform());
        std::vector<double> mu(16), x(16);
        for (std::size_t i = 0; i < 16; ++i) {
            mu[i] = rng.uniform();
            x[i] = mu[i] + (rng.uniform() - 0.5) * 4.0;
        }
        const auto t = make_target(mu, cov, 15);
        const double m2 = mahalanobis_sq(x, t);
        double sum = 0.0;
        for (double v : contribution_vector(x, t)) sum += v;
        CHECK(m2 >= 0.0);
        CHECK(std::abs(sum - m2) <= 1e-9 * std::max(1.0, m2));
    }
}

TEST_CASE("distance is invariant under affine reparameterisation") {
    hexmeter::Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix samples(400, 16);
        for (std::size_t r = 0; r < 400; ++r) {
            for (std::size_t c = 0; c < 16; ++c) samples(r, c) = rng.uniform() + (c ? samples(r, c - 1) * 0.3 : 0.0);
        }
        Matrix a(16, 16);
        for (std::size_t i = 0; i < 16; ++i) {
            for (std::size_t j = 0; j < 16; ++j) a(i, j) = (rng.uniform() - 0.5) + (i == j ? 2.0 : 0.0);
        }
        std::vector<double> b(16);
        for (double& v : b) v = rng.uniform() * 5.0;
        auto transform = [&](std::span<const double> v) {
            auto out = multiply(a, v);
            for (std::size_t i = 0; i < 16; ++i) out[i] += b[i];
            return out;
        };
        Matrix moved(400, 16);
        for (std::size_t r = 0; r < 400; ++r) {
            const auto t = transform(samples.row(r));
            std::copy(t.begin(), t.end(), moved.row(r).begin());
        }
        std::vector<double> x(16);
        for (double& v : x) v = rng.uniform() * 2.0;
        const double before = mahalanobis_sq(x, make_target(samples, 15));
        const double after = mahalanobis_sq(transform(x), make_target(moved, 15));
        CHECK(std::abs(after - before) <= 1e-6 * before);
    }
}

TEST_CASE("Pearson correlation") {
    const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{-1, -2, -3, -4}, k{1, 1, 1, 1};
    CHECK(*pearson_r(a, a) == doctest::Approx(1.0));
    CHECK(*pearson_r(a, b) == doctest::Approx(1.0));
    CHECK(*pearson_r(a, c) == doctest::Approx(-1.0));
    CHECK(*pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{6, 4, 2}) == doctest::Approx(-1.0));
    CHECK_FALSE(pearson_r(a, k));
    CHECK_FALSE(pearson_r(std::vector<double>{1}, std::vector<double>{2}));
    CHECK_THROWS_AS(pearson_r(a, std::vector<double>{1, 2}), DataError);
}

TEST_CASE("degrees of freedom default") {
    CHECK(default_df(16) == 15);
    Matrix s(10, 16);
    hexmeter::Rng rng(1);
    for (std::size_t r = 0; r < 10; ++r) {
        for (std::size_t c = 0; c < 16; ++c) s(r, c) = rng.uniform();
    }
    CHECK(make_target(s, 15).df == 15);
}
