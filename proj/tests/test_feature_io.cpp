#include <doctest.h>

#include "hexmeter/error.hpp"
#include "hexmeter/feature_io.hpp"
#include "support.hpp"

#include <sstream>

using namespace hexmeter;

namespace {

std::vector<FeatureRow> sample_rows() {
    FeatureRow a{"aen", "1:952", {}};
    a.values.values = testing::kLine952Features;
    FeatureRow b{"pun, odd", "8:144", {}};
    b.values[Feature::SYN] = 2;
    b.values[Feature::F3SC] = 0.75;
    return {a, b};
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.123456789) == "0.123457");
    CHECK(format_number(36.82) == "36.82");
}

TEST_CASE("CSV round trip") {
    std::ostringstream out;
    write_features_csv(out, sample_rows());
    const std::string text = out.str();
    CHECK(text.rfind("source_id,name,F1S,F2S,F3S,F4S,F1C,F2C,F3C,F4C,BD,F2SC,F3SC,F4SC,F2WC,F3WC,F4WC,SYN\n", 0) == 0);
    CHECK(text.find("aen,1:952,0,0,0,1,0,1,1,1,0,1,1,0,0,0,0,0\n") != std::string::npos);

    const auto back = parse_features("# manifest: {}\n" + text);
    REQUIRE(back.size() == 2);
    CHECK(back[1].source_id == "pun, odd");
    CHECK(back[1].values[Feature::F3SC] == 0.75);
    CHECK(back[0].values.values == testing::kLine952Features);
}

TEST_CASE("JSONL round trip") {
    std::ostringstream out;
    out << "{\"manifest\": {\"command\": \"features\"}}\n";
    write_features_jsonl(out, sample_rows());
    const auto back = parse_features(out.str());
    REQUIRE(back.size() == 2);
    CHECK(back[0].name == "1:952");
    CHECK(back[1].values[Feature::SYN] == 2);
}

TEST_CASE("columns are matched by name") {
    const auto rows = parse_features(
        "source_id,name,SYN,F4WC,F3WC,F2WC,F4SC,F3SC,F2SC,BD,F4C,F3C,F2C,F1C,F4S,F3S,F2S,F1S\n"
        "s,1,3,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].values[Feature::SYN] == 3);
    CHECK(rows[0].values[Feature::F1S] == 1);
}

TEST_CASE("malformed feature files") {
    CHECK_THROWS_AS(parse_features("id,name\n"), DataError);
    CHECK_THROWS_AS(parse_features("source_id,name,F1S\n"), DataError);
    std::ostringstream out;
    write_features_csv(out, sample_rows());
    CHECK_THROWS_AS(parse_features(out.str() + "x,y,1,2\n"), DataError);
    CHECK_THROWS_AS(parse_features(out.str() + "x,y,a,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n"), DataError);
    CHECK(parse_features("").empty());
}
