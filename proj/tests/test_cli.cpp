#include <doctest.h>

#include "hexmeter/cli.hpp"
#include "hexmeter/digest.hpp"
#include "hexmeter/feature_io.hpp"
#include "hexmeter/novelty.hpp"
#include "support.hpp"

#include <fstream>
#include <sstream>

using namespace hexmeter;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_feature_file(const fs::path& dir, const std::string& name, const std::vector<FeatureVector>& lines) {
    std::vector<FeatureRow> rows;
    for (std::size_t i = 0; i < lines.size(); ++i) rows.push_back({name, std::to_string(i + 1), lines[i]});
    const auto path = dir / (name + ".csv");
    std::ofstream f(path);
    write_features_csv(f, rows);
    return path.string();
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(cli::data_section(text));
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

}  // namespace

TEST_CASE("features on the reference line") {
    const auto dir = testing::temp_dir("cli_features");
    const auto xml = dir / "one.xml";
    std::ofstream(xml) << "<text>" << testing::kLine952 << "</text>";
    const auto r = run({"features", xml.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("# manifest: {", 0) == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "source_id,name,F1S,F2S,F3S,F4S,F1C,F2C,F3C,F4C,BD,F2SC,F3SC,F4SC,F2WC,F3WC,F4WC,SYN");
    CHECK(lines[1] == "one,952,0,0,0,1,0,1,1,1,0,1,1,0,0,0,0,0");
    CHECK(r.err.find("lines: 1") != std::string::npos);

    const auto parsed = parse_features(r.out);
    REQUIRE(parsed.size() == 1);
    for (std::size_t i = 0; i < 16; ++i) CHECK(parsed[0].values[i] == testing::kLine952Features[i]);

    const auto j = run({"--format", "jsonl", "features", xml.string()});
    REQUIRE(j.code == 0);
    CHECK(j.out.rfind("{\"manifest\":", 0) == 0);
    CHECK(parse_features(j.out)[0].values == parsed[0].values);

    const auto manifest = nlohmann::json::parse(j.out.substr(0, j.out.find('\n')))["manifest"];
    CHECK(manifest["command"] == "features");
    CHECK(manifest["inputs"][0]["sha256"] == sha256_file(xml));
    CHECK(manifest.contains("prng_id"));
    CHECK(manifest.contains("toolkit_version"));
}

TEST_CASE("features edge cases and exit codes") {
    const auto dir = testing::temp_dir("cli_features_edge");
    const auto empty = dir / "empty.xml";
    std::ofstream(empty) << "<text></text>";
    const auto r = run({"features", empty.string()});
    CHECK(r.code == 0);
    CHECK(data_lines(r.out).size() == 1);

    CHECK(run({"features", (dir / "absent.xml").string()}).code == 2);
    CHECK(run({"features", "--no-such-flag", empty.string()}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"bogus"}).code == 1);
    CHECK(run({"--format", "yaml", "features", empty.string()}).code == 1);

    const auto broken = dir / "broken.xml";
    std::ofstream(broken) << "<text><line name=\"1\">";
    CHECK(run({"features", broken.string()}).code == 2);

    const auto out = dir / "out.csv";
    CHECK(run({"-o", out.string(), "features", empty.string()}).code == 0);
    CHECK(fs::exists(out));
}

TEST_CASE("classify sweep and feature subsets") {
    const auto dir = testing::temp_dir("cli_classify");
    const auto pa = testing::base_profile();
    const auto a = write_feature_file(dir, "alpha", testing::bernoulli_lines(1700, pa, 1));
    const auto b = write_feature_file(dir, "beta", testing::bernoulli_lines(1700, testing::shifted_profile(pa, 8, 0.15), 2));
    const auto sweep = (dir / "sweep.csv").string();
    const auto imp = (dir / "imp.csv").string();
    const auto r = run({"--seed", "3", "classify", a, b, "--sweep", "10,20,40,81", "--trees", "20", "--sweep-output",
                        sweep, "--importances-output", imp});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["data"].size() == 16);
    CHECK(doc["data"][0]["pair"] == nlohmann::json::array({"alpha", "beta"}));
    const auto rows = data_lines(read_file(sweep));
    REQUIRE(rows.size() == 17);
    CHECK(rows[0] == "chunk_size,model,accuracy");
    const auto imp_rows = data_lines(read_file(imp));
    CHECK(imp_rows.size() == 1 + 16 * 2);

    const auto sub = run({"classify", a, b, "--model", "LR", "--features", "F1S,F2S,SYN"});
    REQUIRE(sub.code == 0);
    CHECK(nlohmann::json::parse(sub.out)["data"].size() == 1);
    CHECK(run({"classify", a, b, "--features", "F9X"}).code == 1);
    CHECK(run({"classify", a, b, "--model", "kNN"}).code == 1);
    CHECK(run({"classify", a, b, "--chunk", "900"}).code == 2);
}

TEST_CASE("identical invocations give identical data") {
    const auto dir = testing::temp_dir("cli_determinism");
    const auto pa = testing::base_profile();
    const auto a = write_feature_file(dir, "alpha", testing::bernoulli_lines(900, pa, 1));
    const auto b = write_feature_file(dir, "beta", testing::bernoulli_lines(900, testing::shifted_profile(pa, 4, 0.2), 2));
    const std::vector<std::string> args{"--seed", "11", "classify", a, b, "--chunk", "20", "--trees", "10"};
    const auto first = run(args);
    const auto second = run(args);
    REQUIRE(first.code == 0);
    CHECK(cli::data_section(first.out) == cli::data_section(second.out));
    const auto other = run({"--seed", "12", "classify", a, b, "--chunk", "20", "--trees", "10"});
    CHECK(cli::data_section(first.out) != cli::data_section(other.out));

    const std::vector<std::string> nov{"--seed", "5", "novelty", a, "--query-range", "100..180", "--n", "500"};
    CHECK(cli::data_section(run(nov).out) == cli::data_section(run(nov).out));
}

TEST_CASE("novelty output and errors") {
    const auto dir = testing::temp_dir("cli_novelty");
    const auto a = write_feature_file(dir, "alpha", testing::bernoulli_lines(800, testing::base_profile(), 3));
    const auto r = run({"novelty", a, "--query-range", "1..81", "--n", "400", "--df", "12"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("df         12") != std::string::npos);
    CHECK(r.out.find("Samp%") != std::string::npos);
    CHECK(r.out.find("Mean%") != std::string::npos);
    CHECK(r.out.find("query      1--81") != std::string::npos);

    const auto j = run({"--format", "json", "novelty", a, "--query-range", "1..81", "--n", "400"});
    REQUIRE(j.code == 0);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["data"]["df"] == 15);
    CHECK(doc["data"]["p"].get<double>() == chi2_sf(doc["data"]["M2"].get<double>(), 15));

    CHECK(run({"novelty", a, "--query-range", "1..800", "--n", "400"}).code == 2);
    CHECK(run({"novelty", a, "--query-range", "1..9999", "--n", "400"}).code == 2);
    CHECK(run({"novelty", a, "--n", "400"}).code == 1);
    CHECK(run({"novelty", a, "--query-range", "1..81", "--mode", "sometimes"}).code == 1);

    std::vector<FeatureVector> q(testing::bernoulli_lines(81, testing::base_profile(), 4));
    const auto qf = write_feature_file(dir, "query", q);
    CHECK(run({"novelty", a, "--query-file", qf, "--n", "400"}).code == 0);
}

TEST_CASE("rolling scan outputs") {
    const auto dir = testing::temp_dir("cli_rolling");
    const auto a = write_feature_file(dir, "alpha", testing::bernoulli_lines(405, testing::base_profile(), 5));
    const auto table = (dir / "table.csv").string();
    const auto r = run({"rolling", a, "--n", "300", "--threshold", "0", "--table-output", table});
    REQUIRE(r.code == 0);
    const auto rows = data_lines(r.out);
    REQUIRE(rows.size() == 1 + window_count(405, 81, 27));
    CHECK(rows[0] == "window_start_line,window_label,M2,p,flagged,threshold_m2");
    CHECK(rows[1].rfind("1,1--81,", 0) == 0);
    CHECK(rows[2].rfind("28,28--108,", 0) == 0);
    const auto t = data_lines(read_file(table));
    CHECK(t[0] == "window_label,M2,p,feature,score,samp_pct,mean_pct");
    CHECK(t.size() == 1 + 16 * window_count(405, 81, 27));
    CHECK(r.err.find("windows: 13") != std::string::npos);

    const auto ex = run({"rolling", a, "--n", "300", "--exclude-range", "1..81"});
    REQUIRE(ex.code == 0);
    const auto ex_rows = data_lines(ex.out);
    CHECK(ex_rows.size() == 1 + window_count(324, 81, 27));
    CHECK(ex_rows[1].rfind("1,82--162,", 0) == 0);

    const auto ref = run({"rolling", a, "--n", "300", "--threshold-from-query", "1..81"});
    CHECK(ref.code == 0);
    CHECK(run({"rolling", a, "--window", "500"}).code == 2);
    CHECK(run({"rolling", a, "--step", "0"}).code == 1);
}

TEST_CASE("correlations command") {
    const auto dir = testing::temp_dir("cli_corr");
    auto lines = testing::bernoulli_lines(1000, testing::base_profile(), 6);
    for (auto& v : lines) v[Feature::F4WC] = v[Feature::F2S];
    const auto a = write_feature_file(dir, "alpha", lines);
    const auto r = run({"correlations", a});
    REQUIRE(r.code == 0);
    const auto rows = data_lines(r.out);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[1] == "F2S,F4WC,1");
    CHECK(data_lines(run({"correlations", a, "--threshold", "1.1"}).out).size() == 1);
}

TEST_CASE("manifest stripping") {
    CHECK(cli::data_section("# manifest: {}\na,b\n1,2\n") == "a,b\n1,2\n");
    CHECK(cli::data_section("{\"manifest\":{}}\n{\"x\":1}\n") == "{\"x\":1}\n");
    const auto doc = cli::data_section("{\"manifest\":{\"seed\":1},\"data\":[1]}");
    CHECK(nlohmann::json::parse(doc) == nlohmann::json::parse("{\"data\":[1]}"));
}
