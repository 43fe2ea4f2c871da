#include "hexmeter/features.hpp"

#include "hexmeter/error.hpp"

namespace hexmeter {

const std::array<std::string_view, kFeatureCount>& feature_names() {
    static constexpr std::array<std::string_view, kFeatureCount> names{
        "F1S", "F2S", "F3S",  "F4S",  "F1C",  "F2C",  "F3C",  "F4C",
        "BD",  "F2SC", "F3SC", "F4SC", "F2WC", "F3WC", "F4WC", "SYN"};
    return names;
}

std::optional<std::size_t> feature_index(std::string_view name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    return std::nullopt;
}

std::array<double, 4> foot_shape_flags(std::string_view pattern) {
    if (pattern.size() != 4) {
        throw DataError("foot pattern '" + std::string(pattern) + "' must have 4 characters");
    }
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        if (pattern[i] == 'S') {
            out[i] = 1.0;
        } else if (pattern[i] != 'D') {
            throw DataError("foot pattern '" + std::string(pattern) + "': invalid character '" +
                            std::string(1, pattern[i]) + "' at position " + std::to_string(i + 1));
        }
    }
    return out;
}

std::array<double, 4> conflict_flags(const ScannedLine&, const AccentedLine& accents) {
    std::array<double, 4> out{};
    for (int f = 1; f <= 4; ++f) {
        out[static_cast<std::size_t>(f - 1)] = accents.is_accented({f, Slot::Arsis}) ? 0.0 : 1.0;
    }
    return out;
}

namespace {

// Final syllable of each word that ends at a real word break: not the last
// word of the line, not elided into its successor.
template <typename Fn>
void for_each_word_end(const ScannedLine& line, Fn&& fn) {
    for (std::size_t i = 0; i + 1 < line.words.size(); ++i) {
        const auto& w = line.words[i];
        if (w.elision == Elision::Synalepha || w.syllables.empty()) continue;
        fn(w, w.syllables.back());
    }
}

}  // namespace

CaesuraAnalysis analyze_caesurae(const ScannedLine& line) {
    CaesuraAnalysis out;
    for_each_word_end(line, [&](const ScannedWord&, MetricalPosition end) {
        const auto f = static_cast<std::size_t>(end.foot);
        if (end.slot == Slot::Arsis) out.strong[f] = true;
        if (end.slot == Slot::Breve1) out.weak[f] = true;
        if (end.foot == 4 && (end.slot == Slot::Thesis || end.slot == Slot::Breve2)) {
            out.bucolic_diaeresis = true;
        }
    });
    return out;
}

std::array<double, 7> caesura_flags(const ScannedLine& line) {
    const CaesuraAnalysis c = analyze_caesurae(line);
    auto b = [](bool v) { return v ? 1.0 : 0.0; };
    return {b(c.bucolic_diaeresis), b(c.strong[2]), b(c.strong[3]), b(c.strong[4]),
            b(c.weak[2]),           b(c.weak[3]),   b(c.weak[4])};
}

std::vector<std::string> caesura_wb_mismatches(const ScannedLine& line) {
    std::vector<std::string> out;
    for_each_word_end(line, [&](const ScannedWord& w, MetricalPosition end) {
        const bool strong = end.slot == Slot::Arsis;
        const bool weak = end.slot == Slot::Breve1;
        const bool cm = w.word_break == WordBreak::StrongCaesura;
        const bool cf = w.word_break == WordBreak::WeakCaesura;
        if (strong != cm || weak != cf) {
            out.push_back("line " + line.label() + ": '" + w.text + "' ends at " + end.code() +
                          " but wb is '" + w.wb_code + "'");
        }
    });
    return out;
}

int elision_count(const ScannedLine& line) {
    int n = 0;
    for (const auto& w : line.words) {
        if (w.elision == Elision::Synalepha) ++n;
    }
    return n;
}

FeatureVector line_features(const ScannedLine& line, const AccentConfig& cfg) {
    FeatureVector v;
    const auto feet = foot_shape_flags(line.pattern);
    const auto conflicts = conflict_flags(line, accented_positions(line, cfg));
    const auto caesurae = caesura_flags(line);
    for (std::size_t i = 0; i < 4; ++i) {
        v[i] = feet[i];
        v[4 + i] = conflicts[i];
    }
    for (std::size_t i = 0; i < 7; ++i) v[8 + i] = caesurae[i];
    v[Feature::SYN] = static_cast<double>(elision_count(line));
    return v;
}

}  // namespace hexmeter
