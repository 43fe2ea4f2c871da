#include "hexmeter/sampling.hpp"

#include "hexmeter/error.hpp"
#include "hexmeter/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace hexmeter {

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span(order));
    return order;
}

std::vector<FeatureVector> shuffle_lines(std::vector<FeatureVector> vectors, std::uint64_t seed) {
    Rng rng(seed);
    rng.shuffle(std::span(vectors));
    return vectors;
}

FeatureVector mean_vector(std::span<const FeatureVector> vectors) {
    FeatureVector m;
    if (vectors.empty()) return m;
    for (const auto& v : vectors) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) m[i] += v[i];
    }
    const double inv = 1.0 / static_cast<double>(vectors.size());
    for (auto& x : m.values) x *= inv;
    return m;
}

std::vector<FeatureVector> chunk_mean(std::span<const FeatureVector> vectors, std::size_t k) {
    if (k == 0) throw DataError("chunk size must be at least 1");
    std::vector<FeatureVector> out;
    const std::size_t n_chunks = vectors.size() / k;
    out.reserve(n_chunks);
    for (std::size_t c = 0; c < n_chunks; ++c) out.push_back(mean_vector(vectors.subspan(c * k, k)));
    return out;
}

void LabeledDataset::add(FeatureVector x, int label, Provenance p) {
    X.push_back(x);
    y.push_back(label);
    provenance.push_back(std::move(p));
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
    LabeledDataset out;
    for (std::size_t r : rows) out.add(X[r], y[r], provenance[r]);
    return out;
}

std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& ds, double test_fraction,
                                                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw DataError("test fraction must lie strictly between 0 and 1");
    }
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < ds.size(); ++i) by_label[ds.y[i]].push_back(i);

    std::vector<std::size_t> train_rows, test_rows;
    std::uint64_t stream = 0;
    for (auto& [label, rows] : by_label) {
        if (rows.size() < 2) {
            throw DataError("label " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                            " row(s); at least 2 are needed to split");
        }
        Rng rng = Rng::substream(seed, stream++);
        rng.shuffle(std::span(rows));
        const auto n = static_cast<double>(rows.size());
        auto n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
        n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
        test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
        train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
    }
    return {ds.subset(train_rows), ds.subset(test_rows)};
}

Matrix bootstrap_chunks(std::span<const FeatureVector> lines, std::span<const std::size_t> pool, std::size_t k,
                        std::size_t n_samples, std::uint64_t seed, BootstrapMode mode,
                        const DrawObserver& observer) {
    if (pool.empty()) throw DataError("bootstrap needs at least one line");
    if (k == 0) throw DataError("bootstrap chunk size must be at least 1");
    if (mode == BootstrapMode::DistinctLines && k > pool.size()) {
        throw DataError("cannot draw " + std::to_string(k) + " distinct lines from " +
                        std::to_string(pool.size()));
    }
    Matrix out(n_samples, kFeatureCount);
    const double inv_k = 1.0 / static_cast<double>(k);
    std::vector<std::size_t> picked;
    std::vector<char> marked;
    if (mode == BootstrapMode::DistinctLines) {
        picked.reserve(k);
        marked.assign(pool.size(), 0);
    }

    for (std::size_t r = 0; r < n_samples; ++r) {
        Rng rng = Rng::substream(seed, r);
        std::array<double, kFeatureCount> acc{};
        auto take = [&](std::size_t pool_index) {
            const std::size_t line = pool[pool_index];
            if (observer) observer(line);
            const auto& v = lines[line].values;
            for (std::size_t i = 0; i < kFeatureCount; ++i) acc[i] += v[i];
        };
        if (mode == BootstrapMode::PerLine) {
            for (std::size_t j = 0; j < k; ++j) take(static_cast<std::size_t>(rng.below(pool.size())));
        } else {
            // Floyd's algorithm: k distinct indices out of pool.size().
            picked.clear();
            const std::size_t m = pool.size();
            for (std::size_t j = m - k; j < m; ++j) {
                const auto t = static_cast<std::size_t>(rng.below(j + 1));
                const std::size_t chosen = marked[t] ? j : t;
                marked[chosen] = 1;
                picked.push_back(chosen);
            }
            for (std::size_t idx : picked) {
                take(idx);
                marked[idx] = 0;
            }
        }
        auto row = out.row(r);
        for (std::size_t i = 0; i < kFeatureCount; ++i) row[i] = acc[i] * inv_k;
    }
    return out;
}

Matrix bootstrap_chunks(std::span<const FeatureVector> lines, std::size_t k, std::size_t n_samples,
                        std::uint64_t seed, BootstrapMode mode) {
    std::vector<std::size_t> pool(lines.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    return bootstrap_chunks(lines, pool, k, n_samples, seed, mode);
}

}  // namespace hexmeter
