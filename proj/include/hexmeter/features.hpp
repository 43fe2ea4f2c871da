#pragma once

#include "hexmeter/accent.hpp"
#include "hexmeter/corpus.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hexmeter {

inline constexpr std::size_t kFeatureCount = 16;

// Canonical column order of every feature vector.
enum class Feature : std::size_t {
    F1S, F2S, F3S, F4S,        // foot n is a spondee
    F1C, F2C, F3C, F4C,        // ictus/accent conflict in foot n
    BD,                        // bucolic diaeresis
    F2SC, F3SC, F4SC,          // strong caesura in foot n
    F2WC, F3WC, F4WC,          // weak caesura in foot n
    SYN,                       // synalepha count
};

const std::array<std::string_view, kFeatureCount>& feature_names();
std::optional<std::size_t> feature_index(std::string_view name);

struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
    double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// [F1S..F4S]. Throws DataError naming the offending position.
std::array<double, 4> foot_shape_flags(std::string_view pattern);

// [F1C..F4C]: 0 when the foot's arsis carries the word accent (homodyne).
std::array<double, 4> conflict_flags(const ScannedLine& line, const AccentedLine& accents);

// Word breaks derived from syllable positions, for all six feet.
struct CaesuraAnalysis {
    std::array<bool, 7> strong{};  // indexed by foot 1..6
    std::array<bool, 7> weak{};
    bool bucolic_diaeresis = false;
};

CaesuraAnalysis analyze_caesurae(const ScannedLine& line);

// [BD, F2SC, F3SC, F4SC, F2WC, F3WC, F4WC].
std::array<double, 7> caesura_flags(const ScannedLine& line);

// Disagreements between the wb annotations (CM / CF) and the position-derived
// caesurae. Position-derived values are the ones used for features.
std::vector<std::string> caesura_wb_mismatches(const ScannedLine& line);

// Synalephae only; prodelision is not counted.
int elision_count(const ScannedLine& line);

FeatureVector line_features(const ScannedLine& line, const AccentConfig& cfg);

}  // namespace hexmeter
