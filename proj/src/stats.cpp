#include "hexmeter/stats.hpp"

#include "hexmeter/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hexmeter {

MeanCovariance mean_and_covariance(const Matrix& samples) {
    const std::size_t n = samples.rows();
    const std::size_t d = samples.cols();
    if (n < 2) throw DataError("mean_and_covariance needs at least 2 observations, got " + std::to_string(n));

    // Welford's update of the mean and the co-moment matrix.
    std::vector<double> mean(d, 0.0);
    Matrix comoment(d, d);
    std::vector<double> delta(d);
    for (std::size_t r = 0; r < n; ++r) {
        const auto x = samples.row(r);
        const double inv_count = 1.0 / static_cast<double>(r + 1);
        for (std::size_t i = 0; i < d; ++i) {
            delta[i] = x[i] - mean[i];
            mean[i] += delta[i] * inv_count;
        }
        for (std::size_t i = 0; i < d; ++i) {
            const double after = x[i] - mean[i];
            for (std::size_t j = 0; j <= i; ++j) comoment(i, j) += after * delta[j];
        }
    }
    Matrix cov(d, d);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cov(i, j) = comoment(i, j) / denom;
            cov(j, i) = cov(i, j);
        }
    }
    return {std::move(mean), std::move(cov)};
}

TargetDistribution make_target(std::vector<double> mu, Matrix cov, int df) {
    if (df < 1) throw DataError("degrees of freedom must be positive");
    TargetDistribution t;
    SpdInverse inv = invert_spd(cov);
    t.mu = std::move(mu);
    t.cov = std::move(cov);
    t.cov_inv = std::move(inv.inverse);
    t.cov_chol = std::move(inv.cholesky);
    t.ridge_used = inv.ridge;
    t.df = df;
    return t;
}

TargetDistribution make_target(const Matrix& samples, int df) {
    auto mc = mean_and_covariance(samples);
    return make_target(std::move(mc.mean), std::move(mc.covariance), df);
}

double mahalanobis_sq(std::span<const double> x, const TargetDistribution& target) {
    std::vector<double> d(target.dim());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - target.mu[i];
    const auto z = forward_substitute(target.cov_chol, d);
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
}

std::vector<double> contribution_vector(std::span<const double> x, const TargetDistribution& target) {
    std::vector<double> d(target.dim());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - target.mu[i];
    const auto y = multiply(target.cov_inv, d);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= y[i];
    return d;
}

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEps = 1e-16;

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIterations; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by its continued fraction (modified Lentz); for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw DataError("gamma_q: shape must be positive");
    if (x <= 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi2_sf(double x, int df) {
    if (df < 1) throw DataError("chi2_sf: degrees of freedom must be positive");
    if (!(x > 0.0)) return 1.0;
    if (std::isinf(x)) return 0.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

std::optional<double> pearson_r(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("pearson_r: length mismatch");
    const std::size_t n = a.size();
    if (n < 2) return std::nullopt;
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
    };
    if (constant(a) || constant(b)) return std::nullopt;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
    const double r = sab / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace hexmeter
