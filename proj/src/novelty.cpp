#include "hexmeter/novelty.hpp"

#include "hexmeter/error.hpp"
#include "hexmeter/experiment.hpp"
#include "hexmeter/parallel.hpp"
#include "hexmeter/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hexmeter {

nlohmann::ordered_json to_json(const NoveltyReport& report) {
    nlohmann::ordered_json j;
    j["query_id"] = report.query_id;
    j["M2"] = report.M2;
    j["p"] = report.p;
    j["df"] = report.df;
    nlohmann::ordered_json contrib = nlohmann::ordered_json::array();
    for (const auto& c : report.contributions) contrib.push_back({{"feature", c.feature}, {"value", c.value}});
    j["contributions"] = std::move(contrib);
    nlohmann::ordered_json samp = nlohmann::ordered_json::object();
    nlohmann::ordered_json mean = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        samp[std::string(feature_names()[i])] = report.sample_pct[i];
        mean[std::string(feature_names()[i])] = report.target_pct[i];
    }
    j["sample_pct"] = std::move(samp);
    j["target_pct"] = std::move(mean);
    j["n_samples"] = report.n_samples;
    j["chunk_size"] = report.chunk_size;
    j["seed"] = report.seed;
    j["ridge_used"] = report.ridge_used;
    j["prng_id"] = report.prng_id;
    return j;
}

void check_consistency(const NoveltyReport& report) {
    double sum = 0.0;
    for (const auto& c : report.contributions) sum += c.value;
    if (std::abs(sum - report.M2) > 1e-9 * std::max(1.0, std::abs(report.M2))) {
        throw NumericalError("contributions of '" + report.query_id + "' sum to " + std::to_string(sum) +
                             " but M2 is " + std::to_string(report.M2));
    }
    if (std::abs(chi2_sf(report.M2, report.df) - report.p) > 1e-15) {
        throw NumericalError("p-value of '" + report.query_id + "' does not match chi2_sf(M2, df)");
    }
}

namespace {

std::vector<std::size_t> pool_without(std::size_t n, std::span<const std::size_t> exclude) {
    std::vector<char> out(n, 0);
    for (std::size_t e : exclude) {
        if (e >= n) throw DataError("excluded line " + std::to_string(e) + " is outside the corpus");
        out[e] = 1;
    }
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < n; ++i) {
        if (!out[i]) pool.push_back(i);
    }
    return pool;
}

}  // namespace

TargetDistribution build_target(std::span<const FeatureVector> lines, std::span<const std::size_t> exclude,
                                const NoveltyParams& params, const DrawObserver& observer) {
    const auto pool = pool_without(lines.size(), exclude);
    if (pool.size() < params.chunk_size || pool.empty()) {
        throw DataError("only " + std::to_string(pool.size()) + " lines remain for the target; " +
                        std::to_string(params.chunk_size) + " are needed per chunk");
    }
    if (params.n_samples < 2) throw DataError("the target needs at least 2 bootstrap samples");
    const Matrix samples =
        bootstrap_chunks(lines, pool, params.chunk_size, params.n_samples, params.seed, params.mode, observer);
    return make_target(samples, params.df);
}

NoveltyReport score_query(std::string query_id, const FeatureVector& query, const TargetDistribution& target,
                          const NoveltyParams& params) {
    NoveltyReport r;
    r.query_id = std::move(query_id);
    r.M2 = mahalanobis_sq(query.values, target);
    r.df = target.df;
    r.p = chi2_sf(r.M2, r.df);
    const auto contrib = contribution_vector(query.values, target);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        r.contributions.push_back({std::string(feature_names()[i]), contrib[i]});
        r.sample_pct[i] = query[i] * 100.0;
        r.target_pct[i] = target.mu[i] * 100.0;
    }
    std::stable_sort(r.contributions.begin(), r.contributions.end(),
                     [](const auto& a, const auto& b) { return a.value > b.value; });
    r.n_samples = params.n_samples;
    r.chunk_size = params.chunk_size;
    r.seed = params.seed;
    r.ridge_used = target.ridge_used;
    r.prng_id = std::string(kPrngId);
    check_consistency(r);
    return r;
}

NoveltyReport novelty_test(std::string query_id, std::span<const FeatureVector> query,
                           std::span<const FeatureVector> corpus, std::span<const std::size_t> exclude,
                           const NoveltyParams& params) {
    if (query.empty()) throw DataError("the query has no lines");
    const TargetDistribution target = build_target(corpus, exclude, params);
    return score_query(std::move(query_id), mean_vector(query), target, params);
}

NoveltyReport centroid_compare(std::string query_id, std::span<const FeatureVector> a,
                               std::span<const FeatureVector> b, const NoveltyParams& params) {
    if (a.empty() || b.empty()) throw DataError("centroid comparison needs two non-empty corpora");
    const TargetDistribution target = build_target(b, {}, params);
    return score_query(std::move(query_id), mean_vector(a), target, params);
}

std::size_t window_count(std::size_t n, std::size_t window, std::size_t step) {
    if (window == 0 || step == 0 || n < window) return 0;
    return (n - window) / step + 1;
}

std::vector<RollingWindow> rolling_scan(std::span<const FeatureVector> lines, std::span<const std::string> labels,
                                        const RollingOptions& options, const NoveltyParams& params) {
    if (options.window == 0 || options.step == 0) throw DataError("window and step must be at least 1");
    if (lines.size() < options.window) {
        throw DataError("window of " + std::to_string(options.window) + " lines exceeds the corpus of " +
                        std::to_string(lines.size()));
    }
    if (!labels.empty() && labels.size() != lines.size()) throw DataError("one label per line is required");

    const std::size_t n_windows = window_count(lines.size(), options.window, options.step);
    std::vector<RollingWindow> out(n_windows);
    parallel_for(n_windows, [&](std::size_t w) {
        const std::size_t start = w * options.step;
        std::vector<std::size_t> exclude(options.window);
        std::iota(exclude.begin(), exclude.end(), start);

        NoveltyParams p = params;
        p.seed = derive_seed(params.seed, w);
        DrawObserver observer;
        if (options.observer) observer = [&, w](std::size_t line) { options.observer(w, line); };
        const TargetDistribution target = build_target(lines, exclude, p, observer);

        RollingWindow& rw = out[w];
        rw.start = start;
        const std::size_t last = start + options.window - 1;
        rw.label = labels.empty() ? std::to_string(start + 1) + "--" + std::to_string(last + 1)
                                  : labels[start] + "--" + labels[last];
        rw.report = score_query(rw.label, mean_vector(lines.subspan(start, options.window)), target, p);
        rw.flagged = options.threshold_m2 ? rw.report.M2 > *options.threshold_m2 : rw.report.p < 0.01;
    });
    return out;
}

CorrelationTable correlation_table(std::span<const FeatureVector> lines, double threshold) {
    if (lines.size() < 2) throw DataError("correlations need at least 2 lines");
    std::array<std::vector<double>, kFeatureCount> columns;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        columns[f].reserve(lines.size());
        for (const auto& v : lines) columns[f].push_back(v[f]);
    }
    CorrelationTable table;
    std::array<bool, kFeatureCount> constant{};
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const auto [lo, hi] = std::minmax_element(columns[f].begin(), columns[f].end());
        constant[f] = *lo == *hi;
        if (constant[f]) {
            table.notices.push_back(std::string(feature_names()[f]) + " is constant and was skipped");
        }
    }
    for (std::size_t a = 0; a < kFeatureCount; ++a) {
        if (constant[a]) continue;
        for (std::size_t b = a + 1; b < kFeatureCount; ++b) {
            if (constant[b]) continue;
            const auto r = pearson_r(columns[a], columns[b]);
            if (r && std::abs(*r) >= threshold) {
                table.pairs.push_back({std::string(feature_names()[a]), std::string(feature_names()[b]), *r});
            }
        }
    }
    std::stable_sort(table.pairs.begin(), table.pairs.end(),
                     [](const auto& x, const auto& y) { return std::abs(x.r) > std::abs(y.r); });
    return table;
}

}  // namespace hexmeter
