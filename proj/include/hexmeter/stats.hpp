#pragma once

#include "hexmeter/linalg.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hexmeter {

struct MeanCovariance {
    std::vector<double> mean;
    Matrix covariance;  // sample covariance, denominator n - 1
};

// Rows of `samples` are observations. Throws DataError for fewer than 2 rows.
MeanCovariance mean_and_covariance(const Matrix& samples);

struct TargetDistribution {
    std::vector<double> mu;
    Matrix cov;
    Matrix cov_inv;   // (cov + ridge_used I)^-1
    Matrix cov_chol;  // Cholesky factor of cov + ridge_used I
    double ridge_used = 0.0;
    int df = 15;

    std::size_t dim() const noexcept { return mu.size(); }
};

// Default chi-square degrees of freedom for a d-feature target: d - 1.
inline int default_df(std::size_t dim) { return static_cast<int>(dim) - 1; }

TargetDistribution make_target(std::vector<double> mu, Matrix cov, int df);
TargetDistribution make_target(const Matrix& samples, int df);

// (x - mu)^T C^-1 (x - mu), evaluated as |L^-1 (x - mu)|^2.
double mahalanobis_sq(std::span<const double> x, const TargetDistribution& target);

// d_i * (C^-1 d)_i with d = x - mu; entries sum to the squared distance and
// may be negative.
std::vector<double> contribution_vector(std::span<const double> x, const TargetDistribution& target);

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// P(chi^2_df > x).
double chi2_sf(double x, int df);

// Sample correlation, or nullopt when either input is constant.
std::optional<double> pearson_r(std::span<const double> a, std::span<const double> b);

}  // namespace hexmeter
