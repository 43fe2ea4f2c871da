#pragma once

// Pairwise authorship experiments: shuffle, chunk, split, train, evaluate.

#include "hexmeter/features.hpp"
#include "hexmeter/models.hpp"
#include "hexmeter/sampling.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hexmeter {

struct NamedCorpus {
    std::string name;
    std::span<const FeatureVector> lines;
};

struct ImportanceEntry {
    std::string feature;
    double score = 0.0;
};

struct ExperimentReport {
    std::pair<std::string, std::string> pair;
    std::size_t chunk_size = 0;
    ModelKind model = ModelKind::ExtraTrees;
    double accuracy = 0.0;
    // confusion[true][predicted]; index 0 is the first corpus of the pair.
    std::array<std::array<std::size_t, 2>, 2> confusion{};
    // In feature-column order; absent for GaussianNB and LogisticRegression.
    std::optional<std::vector<ImportanceEntry>> importances;
    std::uint64_t seed = 0;
    std::string prng_id;
    std::vector<std::string> warnings;

    std::size_t test_size() const;
};

nlohmann::ordered_json to_json(const ExperimentReport& report);
ExperimentReport experiment_from_json(const nlohmann::ordered_json& j);

// Independent seed for a sub-task of a seeded run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Chunk-mean dataset with label 0 for `a` and 1 for `b`. Each corpus is
// shuffled with its own substream before chunking.
LabeledDataset make_chunk_dataset(const NamedCorpus& a, const NamedCorpus& b, std::size_t chunk_size,
                                  std::uint64_t seed);

// Matrix of the selected columns (all 16 when `columns` is empty).
Matrix design_matrix(std::span<const FeatureVector> rows, std::span<const std::size_t> columns = {});

// Trains on `train`, scores `test`.
ExperimentReport evaluate(ModelKind kind, const LabeledDataset& train, const LabeledDataset& test,
                          const HyperParams& hyper, std::span<const std::size_t> columns = {});

struct ExperimentOptions {
    std::size_t chunk_size = 81;
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    HyperParams hyper{};                // hyper.seed is derived from `seed`
    std::vector<std::size_t> columns;  // feature subset; empty = all
};

// Throws DataError naming the smaller corpus when either has fewer than
// 2 * chunk_size lines.
ExperimentReport pairwise_experiment(const NamedCorpus& a, const NamedCorpus& b, ModelKind kind,
                                     const ExperimentOptions& options);

// Mean importance per feature over reports of one model kind, sorted
// descending (ties keep column order).
std::vector<ImportanceEntry> average_importances(std::span<const ExperimentReport> reports);

// Canonical column indices of the k best features of a ranked table.
std::vector<std::size_t> select_top_k(std::span<const ImportanceEntry> table, std::size_t k);

void write_importances_csv(std::ostream& out, std::span<const ImportanceEntry> table);

}  // namespace hexmeter
