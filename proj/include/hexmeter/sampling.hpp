#pragma once

#include "hexmeter/features.hpp"
#include "hexmeter/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hexmeter {

struct ChunkingConfig {
    std::size_t chunk_size = 81;
    bool shuffle = true;
    std::uint64_t seed = 0;
};

// Seeded permutation of 0..n-1.
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

std::vector<FeatureVector> shuffle_lines(std::vector<FeatureVector> vectors, std::uint64_t seed);

// floor(n / k) means of consecutive k-line blocks; the remainder is dropped.
std::vector<FeatureVector> chunk_mean(std::span<const FeatureVector> vectors, std::size_t k);

FeatureVector mean_vector(std::span<const FeatureVector> vectors);

struct Provenance {
    std::string source_id;
    std::vector<std::string> lines;
};

struct LabeledDataset {
    std::vector<FeatureVector> X;
    std::vector<int> y;
    std::vector<Provenance> provenance;

    std::size_t size() const noexcept { return X.size(); }
    void add(FeatureVector x, int label, Provenance p = {});
    LabeledDataset subset(std::span<const std::size_t> rows) const;
};

// Stratified by label: each label contributes round(test_fraction * n_label)
// rows to the test set, clamped to [1, n_label - 1].
std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& ds, double test_fraction,
                                                           std::uint64_t seed);

enum class BootstrapMode {
    // Each set is k independent uniform draws of lines (with replacement).
    PerLine,
    // Each set is k distinct lines; sets are drawn independently.
    DistinctLines,
};

// Called with every line index a bootstrap draw uses.
using DrawObserver = std::function<void(std::size_t)>;

// n_samples x 16 matrix; row r is the mean of k lines drawn from `pool`
// (indices into `lines`) using substream (seed, r).
Matrix bootstrap_chunks(std::span<const FeatureVector> lines, std::span<const std::size_t> pool, std::size_t k,
                        std::size_t n_samples, std::uint64_t seed, BootstrapMode mode = BootstrapMode::PerLine,
                        const DrawObserver& observer = {});

Matrix bootstrap_chunks(std::span<const FeatureVector> lines, std::size_t k, std::size_t n_samples,
                        std::uint64_t seed, BootstrapMode mode = BootstrapMode::PerLine);

}  // namespace hexmeter
