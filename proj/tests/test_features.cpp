#include <doctest.h>

#include "hexmeter/error.hpp"
#include "hexmeter/features.hpp"
#include "support.hpp"

using namespace hexmeter;

namespace {

ScannedLine build(std::string pattern, std::vector<std::string> codes, std::vector<Elision> elisions = {}) {
    ScannedLine line;
    line.name = "x";
    line.pattern = std::move(pattern);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        ScannedWord w;
        w.text = "lorem";
        REQUIRE_FALSE(parse_syllables(codes[i], w.syllables));
        if (i < elisions.size()) w.elision = elisions[i];
        line.words.push_back(w);
    }
    return line;
}

}  // namespace

TEST_CASE("feature names") {
    CHECK(feature_names()[0] == "F1S");
    CHECK(feature_names()[15] == "SYN");
    CHECK(feature_index("F3WC") == 13u);
    CHECK_FALSE(feature_index("F9X"));
}

TEST_CASE("foot shapes") {
    CHECK(foot_shape_flags("DDDS") == std::array<double, 4>{0, 0, 0, 1});
    CHECK(foot_shape_flags("SSSS") == std::array<double, 4>{1, 1, 1, 1});
    CHECK(foot_shape_flags("DSDS") == std::array<double, 4>{0, 1, 0, 1});
    CHECK_THROWS_AS(foot_shape_flags("DDQS"), DataError);
    CHECK_THROWS_AS(foot_shape_flags("DD"), DataError);
}

TEST_CASE("conflict flags") {
    const auto line = testing::line_952();
    const auto cfg = AccentConfig::defaults();
    CHECK(conflict_flags(line, accented_positions(line, cfg)) == std::array<double, 4>{0, 1, 1, 1});

    ScannedLine none = line;
    AccentedLine empty{&none, {}};
    CHECK(conflict_flags(none, empty) == std::array<double, 4>{1, 1, 1, 1});

    const auto harmony = build("SSSS", {"1A", "1T", "2A", "2T", "3A", "3T", "4A", "4T", "5A", "5b", "5c", "6A", "6X"});
    CHECK(conflict_flags(harmony, accented_positions(harmony, cfg)) == std::array<double, 4>{0, 0, 0, 0});
}

TEST_CASE("caesurae") {
    const auto line = testing::line_952();
    CHECK(caesura_flags(line) == std::array<double, 7>{0, 1, 1, 0, 0, 0, 0});
    CHECK(caesura_wb_mismatches(line).empty());

    const auto whole = build("DDDD", {"1A1b1c2A2b2c3A3b3c4A4b4c5A5b5c6A6X"});
    CHECK(caesura_flags(whole) == std::array<double, 7>{});

    const auto bd = build("DDDD", {"1A1b1c2A2b2c3A3b3c4A4b4c", "5A5b5c6A6X"});
    CHECK(caesura_flags(bd)[0] == 1.0);
    const auto bd_spondee = build("DDDS", {"1A1b1c2A2b2c3A3b3c4A4T", "5A5b5c6A6X"});
    CHECK(caesura_flags(bd_spondee)[0] == 1.0);

    const auto weak = build("DDDD", {"1A1b1c2A2b", "2c3A3b", "3c4A4b", "4c5A5b5c6A6X"});
    CHECK(caesura_flags(weak) == std::array<double, 7>{0, 0, 0, 0, 1, 1, 1});
}

TEST_CASE("strong and weak caesura in one foot need two word ends") {
    // Every split of a dactylic line into two words: at most one caesura.
    const std::string full = "1A1b1c2A2b2c3A3b3c4A4b4c5A5b5c6A6X";
    for (std::size_t cut = 2; cut < full.size(); cut += 2) {
        const auto line = build("DDDD", {full.substr(0, cut), full.substr(cut)});
        const auto f = caesura_flags(line);
        int total = 0;
        for (double v : f) total += static_cast<int>(v);
        CHECK(total <= 1);
        for (std::size_t i = 0; i < 3; ++i) CHECK(f[1 + i] * f[4 + i] == 0.0);
    }
}

TEST_CASE("wb disagreements are reported") {
    auto line = testing::line_952();
    line.words[1].word_break = WordBreak::WeakCaesura;
    line.words[1].wb_code = "CF";
    CHECK_FALSE(caesura_wb_mismatches(line).empty());
}

TEST_CASE("elision count") {
    CHECK(elision_count(testing::line_952()) == 0);
    const auto two = build("SSSS", {"1A", "1T2A", "2T3A3T4A4T5A5b5c6A6X"}, {Elision::Synalepha, Elision::Synalepha});
    CHECK(elision_count(two) == 2);
    const auto mixed = build("SSSS", {"1A", "1T2A", "2T3A3T4A4T5A5b5c6A6X"}, {Elision::Synalepha, Elision::Prodelision});
    CHECK(elision_count(mixed) == 1);
}

TEST_CASE("reference line feature vector") {
    const auto v = line_features(testing::line_952(), AccentConfig::defaults());
    CHECK(v.values == testing::kLine952Features);

    // Word ends at 1c, 2c, 3c, 5b and 6X create no features; overrides put
    // each accent on the word's first syllable, i.e. on the arses of feet 1-4.
    const auto harmony = build("DDDD", {"1A1b1c", "2A2b2c", "3A3b3c", "4A4b4c5A5b", "5c6A6X"});
    auto cfg = AccentConfig::defaults();
    cfg.accent_overrides["lorem"] = 0;
    CHECK(line_features(harmony, cfg).values == std::array<double, 16>{});
}
