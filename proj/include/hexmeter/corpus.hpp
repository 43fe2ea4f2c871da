#pragma once

// Scanned hexameter lines as emitted by the Pedecerto / MQDQ XML export:
//
//   <line name="952" metre="H" pattern="DDDS">
//     <word sy="1A1b1c" wb="DI">Vitaque</word>
//     ...
//   </line>
//
// Each syllable code is a foot digit followed by a slot letter.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hexmeter {

enum class Slot : std::uint8_t { Arsis, Thesis, Breve1, Breve2, Anceps };

char slot_letter(Slot s);
std::optional<Slot> slot_from_letter(char c);

struct MetricalPosition {
    int foot = 1;
    Slot slot = Slot::Arsis;

    std::string code() const;  // e.g. "3b"

    friend auto operator<=>(const MetricalPosition&, const MetricalPosition&) = default;
};

// Parses a concatenated code such as "4A4T5A5b". Returns an error message on
// malformed input (odd length, foot outside 1..6, unknown slot letter).
std::optional<std::string> parse_syllables(std::string_view sy, std::vector<MetricalPosition>& out);
std::string syllables_code(const std::vector<MetricalPosition>& syllables);

enum class WordBreak : std::uint8_t {
    StrongCaesura,  // CM
    WeakCaesura,    // CF
    Diaeresis,      // DI
    None,           // no wb attribute (line-final word)
    Other,          // unrecognised code, kept verbatim in wb_code
};

enum class Elision : std::uint8_t { None, Synalepha, Prodelision };

struct ScannedWord {
    std::string text;
    std::vector<MetricalPosition> syllables;
    WordBreak word_break = WordBreak::None;
    std::string wb_code;  // attribute value as found, "" when absent
    Elision elision = Elision::None;
    std::string mf_code;  // attribute value as found, "" when absent

    friend bool operator==(const ScannedWord&, const ScannedWord&) = default;
};

struct ScannedLine {
    std::string name;
    // Title of the enclosing division (book), empty when there is none.
    std::string division;
    std::string metre = "H";
    std::string pattern;
    std::vector<ScannedWord> words;

    // "division:name", or just the name outside a division.
    std::string label() const;

    friend bool operator==(const ScannedLine&, const ScannedLine&) = default;
};

struct SkippedLine {
    std::string name;
    std::string reason;

    friend bool operator==(const SkippedLine&, const SkippedLine&) = default;
};

struct ScannedCorpus {
    std::string source_id;
    std::vector<ScannedLine> lines;
    std::vector<SkippedLine> skipped;
    std::vector<std::string> warnings;
};

struct ParserConfig {
    std::string line_element = "line";
    std::string word_element = "word";
    std::string division_element = "division";
    std::string division_title_attribute = "title";
    std::string elision_attribute = "mf";
    std::string synalepha_value = "SY";
    std::string prodelision_value = "PE";
};

WordBreak word_break_from_code(std::string_view code);
Elision elision_from_code(std::string_view code, const ParserConfig& cfg);

// Throws XmlError on malformed XML. Lines that are not hexameters or fail
// validation are recorded in `skipped`, never thrown.
ScannedCorpus parse_document(std::string_view xml, std::string source_id = {},
                             const ParserConfig& cfg = {});

// Empty iff the concatenated syllables cover feet 1..6 as the pattern demands.
std::vector<std::string> validate_line(const ScannedLine& line);

// Canonical JSON form: {source_id, lines:[{name, pattern, words:[{text, sy, wb, mf}]}],
// skipped:[{name, reason}]}.
std::string corpus_to_json(const ScannedCorpus& corpus, int indent = -1);
ScannedCorpus corpus_from_json(std::string_view json, const ParserConfig& cfg = {});

}  // namespace hexmeter
