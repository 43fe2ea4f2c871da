#pragma once

// One-class novelty detection: a bootstrap target of k-line chunk means,
// Mahalanobis distance of a query chunk, and the per-feature contributions.

#include "hexmeter/features.hpp"
#include "hexmeter/sampling.hpp"
#include "hexmeter/stats.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace hexmeter {

struct NoveltyParams {
    std::size_t chunk_size = 81;
    std::size_t n_samples = 10000;
    std::uint64_t seed = 0;
    int df = 15;
    BootstrapMode mode = BootstrapMode::DistinctLines;
};

struct Contribution {
    std::string feature;
    double value = 0.0;
};

struct NoveltyReport {
    std::string query_id;
    double M2 = 0.0;
    double p = 1.0;
    int df = 15;
    std::vector<Contribution> contributions;  // sorted descending
    std::array<double, kFeatureCount> sample_pct{};
    std::array<double, kFeatureCount> target_pct{};
    std::size_t n_samples = 0;
    std::size_t chunk_size = 0;
    std::uint64_t seed = 0;
    double ridge_used = 0.0;
    std::string prng_id;
};

nlohmann::ordered_json to_json(const NoveltyReport& report);

// Throws NumericalError unless the contributions sum to M2 (1e-9 relative)
// and p equals chi2_sf(M2, df).
void check_consistency(const NoveltyReport& report);

// Bootstrap target over all lines not in `exclude`.
TargetDistribution build_target(std::span<const FeatureVector> lines, std::span<const std::size_t> exclude,
                                const NoveltyParams& params, const DrawObserver& observer = {});

// Scores one query vector against a target.
NoveltyReport score_query(std::string query_id, const FeatureVector& query, const TargetDistribution& target,
                          const NoveltyParams& params);

// The query lines are collapsed to their mean. `exclude` lists the corpus
// lines the query was taken from; they are left out of the target.
NoveltyReport novelty_test(std::string query_id, std::span<const FeatureVector> query,
                           std::span<const FeatureVector> corpus, std::span<const std::size_t> exclude,
                           const NoveltyParams& params);

// Centroid of `a` scored against a target drawn from all of `b`.
NoveltyReport centroid_compare(std::string query_id, std::span<const FeatureVector> a,
                               std::span<const FeatureVector> b, const NoveltyParams& params);

struct RollingWindow {
    std::size_t start = 0;
    std::string label;  // "first--last" line labels
    NoveltyReport report;
    bool flagged = false;
};

struct RollingOptions {
    std::size_t window = 81;
    std::size_t step = 27;
    // Flag windows with M2 above this; when absent, flag p < 0.01.
    std::optional<double> threshold_m2;
    // Test hook: called with (window index, line index) for every draw.
    std::function<void(std::size_t, std::size_t)> observer;
};

std::size_t window_count(std::size_t n, std::size_t window, std::size_t step);

// Each window is scored against a target built from every other line, with
// bootstrap seed derived from (params.seed, window index). `labels` names the
// lines and may be empty.
std::vector<RollingWindow> rolling_scan(std::span<const FeatureVector> lines, std::span<const std::string> labels,
                                        const RollingOptions& options, const NoveltyParams& params);

struct CorrelationPair {
    std::string a;
    std::string b;
    double r = 0.0;
};

struct CorrelationTable {
    std::vector<CorrelationPair> pairs;  // sorted by |r| descending
    std::vector<std::string> notices;
};

CorrelationTable correlation_table(std::span<const FeatureVector> lines, double threshold);

}  // namespace hexmeter
