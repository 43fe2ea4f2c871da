#include "hexmeter/experiment.hpp"

#include "hexmeter/error.hpp"
#include "hexmeter/feature_io.hpp"
#include "hexmeter/rng.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>

namespace hexmeter {

std::size_t ExperimentReport::test_size() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
}

nlohmann::ordered_json to_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    j["pair"] = {report.pair.first, report.pair.second};
    j["chunk_size"] = report.chunk_size;
    j["model"] = std::string(model_name(report.model));
    j["accuracy"] = report.accuracy;
    j["confusion"] = {{report.confusion[0][0], report.confusion[0][1]},
                      {report.confusion[1][0], report.confusion[1][1]}};
    if (report.importances) {
        nlohmann::ordered_json imp = nlohmann::ordered_json::object();
        for (const auto& e : *report.importances) imp[e.feature] = e.score;
        j["importances"] = std::move(imp);
    } else {
        j["importances"] = nullptr;
    }
    j["seed"] = report.seed;
    j["prng_id"] = report.prng_id;
    return j;
}

ExperimentReport experiment_from_json(const nlohmann::ordered_json& j) {
    try {
        ExperimentReport r;
        r.pair = {j.at("pair").at(0).get<std::string>(), j.at("pair").at(1).get<std::string>()};
        r.chunk_size = j.at("chunk_size").get<std::size_t>();
        const auto kind = model_from_name(j.at("model").get<std::string>());
        if (!kind) throw DataError("unknown model " + j.at("model").dump());
        r.model = *kind;
        r.accuracy = j.at("accuracy").get<double>();
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t b = 0; b < 2; ++b) r.confusion[a][b] = j.at("confusion").at(a).at(b).get<std::size_t>();
        }
        if (!j.at("importances").is_null()) {
            std::vector<ImportanceEntry> imp;
            for (const auto& [k, v] : j.at("importances").items()) imp.push_back({k, v.get<double>()});
            r.importances = std::move(imp);
        }
        r.seed = j.at("seed").get<std::uint64_t>();
        r.prng_id = j.at("prng_id").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed experiment report: ") + e.what());
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return Rng::substream(seed, stream)(); }

LabeledDataset make_chunk_dataset(const NamedCorpus& a, const NamedCorpus& b, std::size_t chunk_size,
                                  std::uint64_t seed) {
    LabeledDataset ds;
    const NamedCorpus* corpora[2] = {&a, &b};
    for (int label = 0; label < 2; ++label) {
        const NamedCorpus& c = *corpora[label];
        const auto order = shuffled_order(c.lines.size(), derive_seed(seed, static_cast<std::uint64_t>(label)));
        const std::size_t n_chunks = chunk_size == 0 ? 0 : c.lines.size() / chunk_size;
        if (chunk_size == 0) throw DataError("chunk size must be at least 1");
        std::vector<FeatureVector> block(chunk_size);
        for (std::size_t ch = 0; ch < n_chunks; ++ch) {
            Provenance p{c.name, {}};
            for (std::size_t j = 0; j < chunk_size; ++j) {
                const std::size_t line = order[ch * chunk_size + j];
                block[j] = c.lines[line];
                p.lines.push_back(std::to_string(line));
            }
            ds.add(mean_vector(block), label, std::move(p));
        }
    }
    return ds;
}

Matrix design_matrix(std::span<const FeatureVector> rows, std::span<const std::size_t> columns) {
    std::vector<std::size_t> all;
    if (columns.empty()) {
        all.resize(kFeatureCount);
        std::iota(all.begin(), all.end(), std::size_t{0});
        columns = all;
    }
    Matrix m(rows.size(), columns.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c] >= kFeatureCount) throw DataError("feature column out of range");
            m(r, c) = rows[r][columns[c]];
        }
    }
    return m;
}

ExperimentReport evaluate(ModelKind kind, const LabeledDataset& train_set, const LabeledDataset& test_set,
                          const HyperParams& hyper, std::span<const std::size_t> columns) {
    std::vector<std::string> names;
    if (columns.empty()) {
        for (auto n : feature_names()) names.emplace_back(n);
    } else {
        for (std::size_t c : columns) {
            if (c >= kFeatureCount) throw DataError("feature column out of range");
            names.emplace_back(feature_names()[c]);
        }
    }
    const TrainedModel model = train(kind, design_matrix(train_set.X, columns), train_set.y, hyper, names);
    const auto predicted = model.predict(design_matrix(test_set.X, columns));

    ExperimentReport r;
    r.model = kind;
    r.seed = hyper.seed;
    r.prng_id = std::string(kPrngId);
    r.warnings = model.warnings();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const int truth = test_set.y[i];
        if (truth < 0 || truth > 1 || predicted[i] < 0 || predicted[i] > 1) {
            throw DataError("experiment labels must be 0 and 1");
        }
        ++r.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted[i])];
        if (truth == predicted[i]) ++correct;
    }
    r.accuracy = predicted.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(predicted.size());
    if (auto imp = model.feature_importances()) {
        std::vector<ImportanceEntry> entries;
        for (std::size_t f = 0; f < imp->size(); ++f) entries.push_back({names[f], (*imp)[f]});
        r.importances = std::move(entries);
    }
    return r;
}

ExperimentReport pairwise_experiment(const NamedCorpus& a, const NamedCorpus& b, ModelKind kind,
                                     const ExperimentOptions& options) {
    const std::size_t need = 2 * options.chunk_size;
    if (options.chunk_size == 0) throw DataError("chunk size must be at least 1");
    if (a.lines.size() < need || b.lines.size() < need) {
        const NamedCorpus& small = a.lines.size() <= b.lines.size() ? a : b;
        throw DataError("corpus '" + small.name + "' has " + std::to_string(small.lines.size()) +
                        " lines; at least " + std::to_string(need) + " are needed for chunk size " +
                        std::to_string(options.chunk_size));
    }
    const LabeledDataset ds = make_chunk_dataset(a, b, options.chunk_size, derive_seed(options.seed, 0));
    const auto [train_set, test_set] = train_test_split(ds, options.test_fraction, derive_seed(options.seed, 1));
    HyperParams hyper = options.hyper;
    hyper.seed = derive_seed(options.seed, 2);
    ExperimentReport r = evaluate(kind, train_set, test_set, hyper, options.columns);
    r.pair = {a.name, b.name};
    r.chunk_size = options.chunk_size;
    r.seed = options.seed;
    return r;
}

std::vector<ImportanceEntry> average_importances(std::span<const ExperimentReport> reports) {
    if (reports.empty()) throw DataError("no reports to average");
    const ModelKind kind = reports.front().model;
    std::vector<std::string> order;
    std::map<std::string, double> sum;
    for (const auto& r : reports) {
        if (r.model != kind) throw DataError("cannot average importances across model kinds");
        if (!r.importances) {
            throw DataError(std::string(model_name(r.model)) + " reports carry no feature importances");
        }
        if (&r == &reports.front()) {
            for (const auto& e : *r.importances) order.push_back(e.feature);
        } else if (r.importances->size() != order.size()) {
            throw DataError("reports use different feature sets");
        }
        for (const auto& e : *r.importances) {
            if (&r != &reports.front() && !sum.contains(e.feature)) {
                throw DataError("reports use different feature sets");
            }
            sum[e.feature] += e.score;
        }
    }
    std::vector<ImportanceEntry> out;
    for (const auto& name : order) out.push_back({name, sum[name] / static_cast<double>(reports.size())});
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.score > y.score; });
    return out;
}

std::vector<std::size_t> select_top_k(std::span<const ImportanceEntry> table, std::size_t k) {
    if (k == 0 || k > table.size()) {
        throw DataError("top-k selection needs 1 <= k <= " + std::to_string(table.size()));
    }
    std::vector<const ImportanceEntry*> ranked;
    for (const auto& e : table) ranked.push_back(&e);
    std::stable_sort(ranked.begin(), ranked.end(), [](auto* x, auto* y) { return x->score > y->score; });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) {
        const auto idx = feature_index(ranked[i]->feature);
        if (!idx) throw DataError("unknown feature " + ranked[i]->feature);
        out.push_back(*idx);
    }
    return out;
}

void write_importances_csv(std::ostream& out, std::span<const ImportanceEntry> table) {
    out << "feature,score\n";
    for (const auto& e : table) out << e.feature << ',' << format_number(e.score) << '\n';
}

}  // namespace hexmeter
