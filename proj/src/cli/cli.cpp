#include "hexmeter/cli.hpp"

#include "hexmeter/accent.hpp"
#include "hexmeter/corpus.hpp"
#include "hexmeter/digest.hpp"
#include "hexmeter/error.hpp"
#include "hexmeter/experiment.hpp"
#include "hexmeter/feature_io.hpp"
#include "hexmeter/features.hpp"
#include "hexmeter/fetch.hpp"
#include "hexmeter/novelty.hpp"
#include "hexmeter/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#ifndef HEXMETER_VERSION
#define HEXMETER_VERSION "0.0.0"
#endif

namespace hexmeter::cli {

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["arguments"] = arguments;
    j["seed"] = seed;
    j["prng_id"] = prng_id;
    j["toolkit_version"] = toolkit_version;
    nlohmann::ordered_json in = nlohmann::ordered_json::array();
    for (const auto& d : inputs) in.push_back({{"path", d.path}, {"sha256", d.sha256}});
    j["inputs"] = std::move(in);
    j["timestamp"] = timestamp;
    return j;
}

std::string data_section(const std::string& artifact) {
    std::size_t first = artifact.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && artifact[first] == '{' && artifact.compare(first, 12, "{\"manifest\":") != 0) {
        // Whole-document JSON.
        try {
            auto j = nlohmann::ordered_json::parse(artifact);
            if (j.is_object()) j.erase("manifest");
            return j.dump(2) + "\n";
        } catch (const nlohmann::json::exception&) {
        }
    }
    if (first != std::string::npos && artifact.compare(first, 12, "{\"manifest\":") == 0) {
        // Either a whole document whose first key is the manifest, or JSONL.
        try {
            auto j = nlohmann::ordered_json::parse(artifact);
            j.erase("manifest");
            return j.dump(2) + "\n";
        } catch (const nlohmann::json::exception&) {
        }
    }
    std::string out;
    std::istringstream in(artifact);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# manifest:", 0) == 0 || line.rfind("{\"manifest\":", 0) == 0) continue;
        out += line;
        out += '\n';
    }
    return out;
}

namespace {

std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(sde, &end, 10);
        if (end != sde && *end == '\0') t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct Globals {
    std::uint64_t seed = 0;
    std::string output;
    std::string format;
};

class Context {
public:
    Context(std::string command, const std::vector<std::string>& args, const Globals& g, std::ostream& out,
            std::ostream& err)
        : out_(out), err_(err), globals_(g) {
        manifest_.command = std::move(command);
        manifest_.arguments = args;
        manifest_.seed = g.seed;
        manifest_.prng_id = std::string(kPrngId);
        manifest_.toolkit_version = HEXMETER_VERSION;
        manifest_.timestamp = utc_timestamp();
    }

    std::ostream& err() { return err_; }
    std::ostream& out() { return out_; }
    const Globals& globals() const { return globals_; }
    RunManifest& manifest() { return manifest_; }

    std::string read_input(const std::string& path) {
        std::string text = read_file(path);
        manifest_.inputs.push_back({path, sha256_hex(text)});
        return text;
    }

    std::vector<FeatureRow> read_feature_file(const std::string& path) {
        return parse_features(read_input(path));
    }

    std::string manifest_comment() const { return "# manifest: " + manifest_.to_json().dump() + "\n"; }

    std::string json_document(nlohmann::ordered_json data) const {
        nlohmann::ordered_json doc;
        doc["manifest"] = manifest_.to_json();
        doc["data"] = std::move(data);
        return doc.dump(2) + "\n";
    }

    // Empty path or "-" writes to stdout.
    void emit(const std::string& path, const std::string& content) {
        if (path.empty() || path == "-") {
            out_ << content;
            return;
        }
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot open " + path + " for writing");
        f << content;
        if (!f) throw DataError("failed writing " + path);
    }

    std::string format_or(const std::string& fallback, std::initializer_list<std::string_view> allowed) const {
        const std::string f = globals_.format.empty() ? fallback : globals_.format;
        if (std::find(allowed.begin(), allowed.end(), f) == allowed.end()) {
            std::string list;
            for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
            throw CLI::ValidationError("--format", "'" + f + "' is not one of " + list + " for " + manifest_.command);
        }
        return f;
    }

private:
    std::ostream& out_;
    std::ostream& err_;
    Globals globals_;
    RunManifest manifest_;
};

// ---------------------------------------------------------------------------
// features

struct FeaturesArgs {
    std::vector<std::string> inputs;
    std::string accent_config;
    bool verbose = false;
};

int cmd_features(Context& ctx, const FeaturesArgs& a) {
    const std::string format = ctx.format_or("csv", {"csv", "jsonl"});
    AccentConfig cfg = AccentConfig::defaults();
    if (!a.accent_config.empty()) cfg = AccentConfig::from_json(ctx.read_input(a.accent_config));

    std::vector<FeatureRow> rows;
    std::vector<std::string> failures;
    std::size_t skipped = 0, warnings = 0;
    std::vector<std::string> division_order;
    std::map<std::string, std::pair<std::size_t, std::size_t>> homodyne;  // division -> (F4 homodyne, lines)
    std::size_t homodyne_all = 0;

    for (const auto& path : a.inputs) {
        ScannedCorpus corpus;
        try {
            const std::string text = ctx.read_input(path);
            const std::string stem = std::filesystem::path(path).stem().string();
            if (std::filesystem::path(path).extension() == ".json") {
                corpus = corpus_from_json(text);
                if (corpus.source_id.empty()) corpus.source_id = stem;
            } else {
                corpus = parse_document(text, stem);
            }
        } catch (const DataError& e) {
            failures.push_back(path + ": " + e.what());
            continue;
        }
        skipped += corpus.skipped.size();
        warnings += corpus.warnings.size();
        if (a.verbose) {
            for (const auto& s : corpus.skipped) ctx.err() << path << ": skipped " << s.name << ": " << s.reason << '\n';
            for (const auto& w : corpus.warnings) ctx.err() << path << ": warning: " << w << '\n';
        }
        for (const auto& line : corpus.lines) {
            FeatureRow row{corpus.source_id, line.label(), line_features(line, cfg)};
            if (a.verbose) {
                for (const auto& m : caesura_wb_mismatches(line)) ctx.err() << path << ": " << line.label() << ": " << m << '\n';
            }
            const bool homo = row.values[Feature::F4C] == 0.0;
            const std::string div = corpus.source_id + (line.division.empty() ? "" : ":" + line.division);
            auto [it, inserted] = homodyne.try_emplace(div, 0, 0);
            if (inserted) division_order.push_back(div);
            it->second.first += homo ? 1 : 0;
            it->second.second += 1;
            homodyne_all += homo ? 1 : 0;
            rows.push_back(std::move(row));
        }
    }
    if (!failures.empty()) {
        for (const auto& f : failures) ctx.err() << "error: " << f << '\n';
        return kData;
    }

    std::ostringstream body;
    if (format == "csv") {
        body << ctx.manifest_comment();
        write_features_csv(body, rows);
    } else {
        body << nlohmann::ordered_json{{"manifest", ctx.manifest().to_json()}}.dump() << '\n';
        write_features_jsonl(body, rows);
    }
    ctx.emit(ctx.globals().output, body.str());

    auto pct = [](std::size_t k, std::size_t n) { return n == 0 ? 0.0 : 100.0 * static_cast<double>(k) / static_cast<double>(n); };
    ctx.err() << "lines: " << rows.size() << ", skipped: " << skipped << ", warnings: " << warnings << '\n';
    ctx.err() << "F4 homodyne: " << fixed2(pct(homodyne_all, rows.size())) << "%\n";
    if (division_order.size() > 1) {
        for (const auto& d : division_order) {
            const auto [k, n] = homodyne.at(d);
            ctx.err() << "  " << d << ": " << fixed2(pct(k, n)) << "% of " << n << " lines\n";
        }
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
    std::string corpus_a, corpus_b;
    std::size_t chunk = 81;
    std::string model = "all";
    std::string features;
    std::string sweep;
    std::size_t trials = 1;
    std::size_t trees = 100;
    double test_fraction = 0.2;
    std::string sweep_output;
    std::string importances_output;
};

std::vector<std::size_t> parse_feature_list(const std::string& list) {
    std::vector<std::size_t> out;
    if (list.empty()) return out;
    for (const auto& name : split(list, ',')) {
        const auto idx = feature_index(name);
        if (!idx) throw CLI::ValidationError("--features", "unknown feature '" + name + "'");
        if (std::find(out.begin(), out.end(), *idx) != out.end()) {
            throw CLI::ValidationError("--features", "feature '" + name + "' listed twice");
        }
        out.push_back(*idx);
    }
    return out;
}

std::string corpus_name(const std::vector<FeatureRow>& rows, const std::string& path) {
    if (!rows.empty() && !rows.front().source_id.empty()) return rows.front().source_id;
    return std::filesystem::path(path).stem().string();
}

int cmd_classify(Context& ctx, const ClassifyArgs& a) {
    ctx.format_or("json", {"json"});
    std::vector<ModelKind> models;
    if (a.model == "all") {
        models.assign(kAllModels.begin(), kAllModels.end());
    } else {
        for (const auto& m : split(a.model, ',')) {
            const auto kind = model_from_name(m);
            if (!kind) throw CLI::ValidationError("--model", "unknown model '" + m + "'");
            models.push_back(*kind);
        }
    }
    std::vector<std::size_t> chunks;
    if (!a.sweep.empty()) {
        for (const auto& s : split(a.sweep, ',')) {
            std::size_t v = 0;
            try {
                v = static_cast<std::size_t>(std::stoull(s));
            } catch (const std::exception&) {
                throw CLI::ValidationError("--sweep", "'" + s + "' is not a chunk size");
            }
            if (v == 0) throw CLI::ValidationError("--sweep", "chunk sizes must be positive");
            chunks.push_back(v);
        }
    } else {
        chunks.push_back(a.chunk);
    }
    const auto columns = parse_feature_list(a.features);
    if (a.trials == 0) throw CLI::ValidationError("--trials", "must be at least 1");

    const auto rows_a = ctx.read_feature_file(a.corpus_a);
    const auto rows_b = ctx.read_feature_file(a.corpus_b);
    const auto lines_a = vectors_of(rows_a);
    const auto lines_b = vectors_of(rows_b);
    NamedCorpus ca{corpus_name(rows_a, a.corpus_a), lines_a};
    NamedCorpus cb{corpus_name(rows_b, a.corpus_b), lines_b};

    std::vector<ExperimentReport> reports;
    std::ostringstream sweep;
    sweep << ctx.manifest_comment() << "chunk_size,model,accuracy\n";
    for (std::size_t chunk : chunks) {
        for (ModelKind kind : models) {
            double acc = 0.0;
            for (std::size_t t = 0; t < a.trials; ++t) {
                ExperimentOptions opt;
                opt.chunk_size = chunk;
                opt.test_fraction = a.test_fraction;
                opt.seed = a.trials == 1 ? ctx.globals().seed : derive_seed(ctx.globals().seed, t);
                opt.hyper.n_trees = a.trees;
                opt.columns = columns;
                ExperimentReport r = pairwise_experiment(ca, cb, kind, opt);
                for (const auto& w : r.warnings) ctx.err() << "warning: " << model_name(kind) << ": " << w << '\n';
                acc += r.accuracy;
                reports.push_back(std::move(r));
            }
            sweep << chunk << ',' << model_name(kind) << ',' << format_number(acc / static_cast<double>(a.trials))
                  << '\n';
        }
    }

    nlohmann::ordered_json data = nlohmann::ordered_json::array();
    for (const auto& r : reports) data.push_back(to_json(r));
    ctx.emit(ctx.globals().output, ctx.json_document(std::move(data)));
    if (!a.sweep_output.empty()) ctx.emit(a.sweep_output, sweep.str());

    if (!a.importances_output.empty()) {
        std::ostringstream imp;
        imp << ctx.manifest_comment() << "model,feature,score\n";
        const std::size_t ref_chunk = a.sweep.empty() ? a.chunk : chunks.back();
        for (ModelKind kind : models) {
            std::vector<ExperimentReport> mine;
            for (const auto& r : reports) {
                if (r.model == kind && r.chunk_size == ref_chunk && r.importances) mine.push_back(r);
            }
            if (mine.empty()) continue;
            for (const auto& e : average_importances(mine)) {
                imp << model_name(kind) << ',' << e.feature << ',' << format_number(e.score) << '\n';
            }
        }
        ctx.emit(a.importances_output, imp.str());
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// novelty / rolling

struct NoveltyArgs {
    std::string corpus;
    std::string query_range;
    std::string query_file;
    std::size_t k = 81;
    std::size_t n = 10000;
    int df = 15;
    std::string mode = "distinct";
};

BootstrapMode parse_mode(const std::string& m) {
    if (m == "distinct") return BootstrapMode::DistinctLines;
    if (m == "per-line") return BootstrapMode::PerLine;
    throw CLI::ValidationError("--mode", "'" + m + "' is not distinct or per-line");
}

// "FIRST..LAST" by line name, inclusive. Returns row indices.
std::pair<std::size_t, std::size_t> resolve_range(const std::vector<FeatureRow>& rows, const std::string& range) {
    const auto sep = range.find("..");
    if (sep == std::string::npos) throw DataError("range '" + range + "' must look like FIRST..LAST");
    const std::string first = range.substr(0, sep);
    const std::string last = range.substr(sep + 2);
    std::optional<std::size_t> lo, hi;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!lo && rows[i].name == first) lo = i;
        if (rows[i].name == last) hi = i;
    }
    if (!lo) throw DataError("line '" + first + "' is not in the corpus");
    if (!hi) throw DataError("line '" + last + "' is not in the corpus");
    if (*hi < *lo) throw DataError("range '" + range + "' ends before it starts");
    return {*lo, *hi};
}

std::string novelty_table(const NoveltyReport& r) {
    std::ostringstream t;
    char buf[160];
    t << "query      " << r.query_id << '\n';
    t << "M2         " << format_number(r.M2) << '\n';
    t << "p          " << format_number(r.p) << '\n';
    t << "df         " << r.df << '\n';
    t << "n_samples  " << r.n_samples << '\n';
    t << "chunk_size " << r.chunk_size << '\n';
    t << "ridge_used " << format_number(r.ridge_used) << '\n';
    t << '\n';
    std::snprintf(buf, sizeof buf, "%-8s %10s %8s %8s\n", "feature", "score", "Samp%", "Mean%");
    t << buf;
    for (const auto& c : r.contributions) {
        const std::size_t i = *feature_index(c.feature);
        std::snprintf(buf, sizeof buf, "%-8s %10s %8s %8s\n", c.feature.c_str(), format_number(c.value).c_str(),
                      fixed2(r.sample_pct[i]).c_str(), fixed2(r.target_pct[i]).c_str());
        t << buf;
    }
    return t.str();
}

NoveltyParams novelty_params(std::size_t k, std::size_t n, int df, const std::string& mode, std::uint64_t seed) {
    if (df <= 0) throw CLI::ValidationError("--df", "must be positive");
    if (k == 0) throw CLI::ValidationError("--k", "must be positive");
    NoveltyParams p;
    p.chunk_size = k;
    p.n_samples = n;
    p.df = df;
    p.mode = parse_mode(mode);
    p.seed = seed;
    return p;
}

int cmd_novelty(Context& ctx, const NoveltyArgs& a) {
    const std::string format = ctx.format_or("table", {"table", "json"});
    if (a.query_range.empty() == a.query_file.empty()) {
        throw CLI::ValidationError("novelty", "give exactly one of --query-range and --query-file");
    }
    const NoveltyParams params = novelty_params(a.k, a.n, a.df, a.mode, ctx.globals().seed);
    const auto rows = ctx.read_feature_file(a.corpus);
    const auto lines = vectors_of(rows);

    std::vector<FeatureVector> query;
    std::vector<std::size_t> exclude;
    std::string query_id;
    if (!a.query_range.empty()) {
        const auto [lo, hi] = resolve_range(rows, a.query_range);
        for (std::size_t i = lo; i <= hi; ++i) {
            query.push_back(lines[i]);
            exclude.push_back(i);
        }
        query_id = rows[lo].name + "--" + rows[hi].name;
    } else {
        const auto qrows = ctx.read_feature_file(a.query_file);
        std::set<std::pair<std::string, std::string>> keys;
        for (const auto& q : qrows) {
            query.push_back(q.values);
            keys.emplace(q.source_id, q.name);
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (keys.contains({rows[i].source_id, rows[i].name})) exclude.push_back(i);
        }
        query_id = corpus_name(qrows, a.query_file);
    }
    if (query.empty()) throw DataError("the query has no lines");
    const NoveltyReport report = novelty_test(query_id, query, lines, exclude, params);

    if (format == "json") {
        ctx.emit(ctx.globals().output, ctx.json_document(to_json(report)));
    } else {
        ctx.emit(ctx.globals().output, ctx.manifest_comment() + novelty_table(report));
    }
    return kOk;
}

struct RollingArgs {
    std::string corpus;
    std::size_t window = 81;
    std::size_t step = 27;
    std::size_t n = 10000;
    int df = 15;
    std::string mode = "distinct";
    std::string exclude_range;
    std::string threshold_from_query;
    std::optional<double> threshold;
    std::string table_output;
};

int cmd_rolling(Context& ctx, const RollingArgs& a) {
    const std::string format = ctx.format_or("csv", {"csv", "json"});
    if (a.step == 0) throw CLI::ValidationError("--step", "must be positive");
    if (a.threshold && !a.threshold_from_query.empty()) {
        throw CLI::ValidationError("rolling", "--threshold and --threshold-from-query are exclusive");
    }
    const NoveltyParams params = novelty_params(a.window, a.n, a.df, a.mode, ctx.globals().seed);
    const auto rows = ctx.read_feature_file(a.corpus);
    const auto all_lines = vectors_of(rows);

    RollingOptions opt;
    opt.window = a.window;
    opt.step = a.step;
    opt.threshold_m2 = a.threshold;
    std::optional<NoveltyReport> reference;
    if (!a.threshold_from_query.empty()) {
        const auto [lo, hi] = resolve_range(rows, a.threshold_from_query);
        std::vector<std::size_t> exclude(hi - lo + 1);
        for (std::size_t i = lo; i <= hi; ++i) exclude[i - lo] = i;
        const std::span<const FeatureVector> query(all_lines.data() + lo, hi - lo + 1);
        reference = novelty_test(rows[lo].name + "--" + rows[hi].name, query, all_lines, exclude, params);
        opt.threshold_m2 = reference->M2;
    }

    std::vector<FeatureVector> lines;
    std::vector<std::string> labels;
    std::optional<std::pair<std::size_t, std::size_t>> removed;
    if (!a.exclude_range.empty()) removed = resolve_range(rows, a.exclude_range);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (removed && i >= removed->first && i <= removed->second) continue;
        lines.push_back(rows[i].values);
        labels.push_back(rows[i].name);
    }
    if (lines.size() < a.window) {
        throw DataError("window of " + std::to_string(a.window) + " lines exceeds the " +
                        std::to_string(lines.size()) + " available lines");
    }
    const auto windows = rolling_scan(lines, labels, opt, params);
    std::size_t flagged = 0;
    for (const auto& w : windows) flagged += w.flagged ? 1 : 0;

    const std::string threshold_text = opt.threshold_m2 ? format_number(*opt.threshold_m2) : "";
    if (format == "json") {
        nlohmann::ordered_json data;
        data["threshold_m2"] = opt.threshold_m2 ? nlohmann::ordered_json(*opt.threshold_m2) : nullptr;
        data["reference"] = reference ? to_json(*reference) : nullptr;
        nlohmann::ordered_json ws = nlohmann::ordered_json::array();
        for (const auto& w : windows) {
            ws.push_back({{"start", w.start}, {"label", w.label}, {"flagged", w.flagged}, {"report", to_json(w.report)}});
        }
        data["windows"] = std::move(ws);
        ctx.emit(ctx.globals().output, ctx.json_document(std::move(data)));
    } else {
        std::ostringstream plot;
        plot << ctx.manifest_comment() << "window_start_line,window_label,M2,p,flagged,threshold_m2\n";
        for (const auto& w : windows) {
            plot << (w.start + 1) << ',' << csv_field(w.label) << ',' << format_number(w.report.M2) << ','
                 << format_number(w.report.p) << ',' << (w.flagged ? 1 : 0) << ',' << threshold_text << '\n';
        }
        ctx.emit(ctx.globals().output, plot.str());
    }

    if (!a.table_output.empty()) {
        std::ostringstream table;
        table << ctx.manifest_comment() << "window_label,M2,p,feature,score,samp_pct,mean_pct\n";
        for (const auto& w : windows) {
            if (!w.flagged) continue;
            for (const auto& c : w.report.contributions) {
                const std::size_t i = *feature_index(c.feature);
                table << csv_field(w.label) << ',' << format_number(w.report.M2) << ',' << format_number(w.report.p)
                      << ',' << c.feature << ',' << format_number(c.value) << ',' << fixed2(w.report.sample_pct[i])
                      << ',' << fixed2(w.report.target_pct[i]) << '\n';
            }
        }
        ctx.emit(a.table_output, table.str());
    }
    ctx.err() << "windows: " << windows.size() << ", flagged: " << flagged;
    if (opt.threshold_m2) ctx.err() << " (M2 > " << threshold_text << ")";
    else ctx.err() << " (p < 0.01)";
    ctx.err() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// correlations / fetch

int cmd_correlations(Context& ctx, const std::string& corpus, double threshold) {
    const std::string format = ctx.format_or("csv", {"csv", "json"});
    const auto lines = vectors_of(ctx.read_feature_file(corpus));
    const CorrelationTable table = correlation_table(lines, threshold);
    for (const auto& n : table.notices) ctx.err() << "notice: " << n << '\n';
    if (format == "json") {
        nlohmann::ordered_json data = nlohmann::ordered_json::array();
        for (const auto& p : table.pairs) data.push_back({{"feature_a", p.a}, {"feature_b", p.b}, {"r", p.r}});
        ctx.emit(ctx.globals().output, ctx.json_document(std::move(data)));
    } else {
        std::ostringstream body;
        body << ctx.manifest_comment() << "feature_a,feature_b,r\n";
        for (const auto& p : table.pairs) body << p.a << ',' << p.b << ',' << format_number(p.r) << '\n';
        ctx.emit(ctx.globals().output, body.str());
    }
    return kOk;
}

int cmd_fetch(Context& ctx, const std::string& url, const std::string& cache_dir, bool refresh) {
    HttpTransport transport;
    const auto dir = cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir);
    const FetchResult r = fetch_corpus(url, dir, transport, refresh);
    for (const auto& w : r.warnings) ctx.err() << "warning: " << w << '\n';
    ctx.out() << (r.from_cache ? "cached " : "fetched ") << r.path.string() << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Metrical stylometry for Latin hexameter", "hexmeter"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HEXMETER_VERSION);

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--output,-o", g.output, "Output file (default: stdout)");
    app.add_option("--format", g.format, "Output format");
    app.fallthrough();

    FeaturesArgs fa;
    auto* features = app.add_subcommand("features", "Extract per-line features from MQDQ XML");
    features->add_option("inputs", fa.inputs, "XML (or canonical JSON) corpus files")->required();
    features->add_option("--accent-config", fa.accent_config, "Accent configuration (JSON)");
    features->add_flag("--verbose,-v", fa.verbose, "List skipped lines and warnings");

    ClassifyArgs ca;
    auto* classify = app.add_subcommand("classify", "Two-author classification experiments");
    classify->add_option("corpus_a", ca.corpus_a, "Feature file of the first author")->required();
    classify->add_option("corpus_b", ca.corpus_b, "Feature file of the second author")->required();
    classify->add_option("--chunk", ca.chunk, "Lines per chunk")->capture_default_str();
    classify->add_option("--model", ca.model, "Model name, comma list, or all")->capture_default_str();
    classify->add_option("--features", ca.features, "Comma-separated feature subset");
    classify->add_option("--sweep", ca.sweep, "Comma-separated chunk sizes");
    classify->add_option("--trials", ca.trials, "Repetitions with derived seeds")->capture_default_str();
    classify->add_option("--trees", ca.trees, "ExtraTrees ensemble size")->capture_default_str();
    classify->add_option("--test-fraction", ca.test_fraction, "Held-out fraction")->capture_default_str();
    classify->add_option("--sweep-output", ca.sweep_output, "CSV of chunk_size, model, accuracy");
    classify->add_option("--importances-output", ca.importances_output, "CSV of averaged importances");

    NoveltyArgs na;
    auto* novelty = app.add_subcommand("novelty", "Score a passage against a bootstrap target");
    novelty->add_option("corpus", na.corpus, "Feature file of the target corpus")->required();
    novelty->add_option("--query-range", na.query_range, "FIRST..LAST line names, inclusive");
    novelty->add_option("--query-file", na.query_file, "Feature file holding the query lines");
    novelty->add_option("--k", na.k, "Lines per bootstrap chunk")->capture_default_str();
    novelty->add_option("--n", na.n, "Bootstrap samples")->capture_default_str();
    novelty->add_option("--df", na.df, "Chi-square degrees of freedom")->capture_default_str();
    novelty->add_option("--mode", na.mode, "distinct or per-line sampling")->capture_default_str();

    RollingArgs ra;
    auto* rolling = app.add_subcommand("rolling", "Rolling-window outlier scan");
    rolling->add_option("corpus", ra.corpus, "Feature file")->required();
    rolling->add_option("--window", ra.window, "Window length")->capture_default_str();
    rolling->add_option("--step", ra.step, "Window step")->capture_default_str();
    rolling->add_option("--n", ra.n, "Bootstrap samples per window")->capture_default_str();
    rolling->add_option("--df", ra.df, "Chi-square degrees of freedom")->capture_default_str();
    rolling->add_option("--mode", ra.mode, "distinct or per-line sampling")->capture_default_str();
    rolling->add_option("--exclude-range", ra.exclude_range, "FIRST..LAST lines removed before scanning");
    rolling->add_option("--threshold-from-query", ra.threshold_from_query, "FIRST..LAST whose M2 is the threshold");
    rolling->add_option("--threshold", ra.threshold, "Explicit M2 threshold");
    rolling->add_option("--table-output", ra.table_output, "CSV of flagged windows with Samp%/Mean%");

    std::string corr_corpus;
    double corr_threshold = 0.5;
    auto* correlations = app.add_subcommand("correlations", "Highly correlated feature pairs");
    correlations->add_option("corpus", corr_corpus, "Feature file")->required();
    correlations->add_option("--threshold", corr_threshold, "Minimum |r|")->capture_default_str();

    std::string url, cache_dir;
    bool refresh = false;
    auto* fetch = app.add_subcommand("fetch", "Download a corpus into the local cache");
    fetch->add_option("url", url, "http(s) URL")->required();
    fetch->add_option("--cache-dir", cache_dir, std::string("Cache directory (default: $") + kCacheDirEnv + ")");
    fetch->add_flag("--refresh", refresh, "Download even when cached");

    std::vector<std::string> argv_storage{"hexmeter"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        out << HEXMETER_VERSION << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    auto* sub = app.get_subcommands().front();
    Context ctx(sub->get_name(), args, g, out, err);
    try {
        if (sub == features) return cmd_features(ctx, fa);
        if (sub == classify) return cmd_classify(ctx, ca);
        if (sub == novelty) return cmd_novelty(ctx, na);
        if (sub == rolling) return cmd_rolling(ctx, ra);
        if (sub == correlations) return cmd_correlations(ctx, corr_corpus, corr_threshold);
        if (sub == fetch) return cmd_fetch(ctx, url, cache_dir, refresh);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}

}  // namespace hexmeter::cli
