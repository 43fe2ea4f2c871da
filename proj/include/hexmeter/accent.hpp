#pragma once

// Latin word accent placed on scanned words. Syllable weight comes from the
// scansion itself: arsis and thesis positions are long, breves are short.

#include "hexmeter/corpus.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hexmeter {

enum class SyllableWeight { Long, Short, Anceps };

SyllableWeight syllable_weight(MetricalPosition position);

enum class ElidedAccentPolicy {
    // A word whose accented syllable was elided carries no accent.
    NoAccentIfAccentedSyllableElided,
};

struct AccentConfig {
    // Normalised forms (see normalize_word) that never carry an accent.
    std::set<std::string> unaccented_words;
    // Normalised enclitic suffixes, e.g. "que", "ue", "ne".
    std::set<std::string> enclitics;
    // Words whose enclitic-looking ending belongs to the root. An entry
    // "*one" matches every word ending in "one".
    std::set<std::string> enclitic_exceptions;
    // Fixed accent index (0-based syllable) for individual words.
    std::map<std::string, int> accent_overrides;
    ElidedAccentPolicy elided_accent_policy = ElidedAccentPolicy::NoAccentIfAccentedSyllableElided;

    static AccentConfig defaults();
    // Keys: unaccented_words, enclitics, enclitic_exceptions (arrays),
    // accent_overrides (object word -> index). Missing keys keep defaults.
    static AccentConfig from_json(std::string_view json);
    static AccentConfig load(const std::filesystem::path& path);

    std::string to_json() const;

    bool is_enclitic_exception(const std::string& normalized) const;
};

// Lowercase, v -> u, j -> i, punctuation removed.
std::string normalize_word(std::string_view text);

// Index of the accented syllable, counting any elided final syllable, or
// nullopt when the word is unaccented.
std::optional<std::size_t> accent_index(const ScannedWord& word, const AccentConfig& cfg);

struct AccentedLine {
    const ScannedLine* line = nullptr;
    // Sorted, at most one per word.
    std::vector<MetricalPosition> accented_positions;

    bool is_accented(MetricalPosition p) const;
};

AccentedLine accented_positions(const ScannedLine& line, const AccentConfig& cfg);

}  // namespace hexmeter
