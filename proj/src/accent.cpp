#include "hexmeter/accent.hpp"

#include "hexmeter/digest.hpp"
#include "hexmeter/error.hpp"

#include <json.hpp>

#include <algorithm>

namespace hexmeter {

SyllableWeight syllable_weight(MetricalPosition position) {
    switch (position.slot) {
        case Slot::Arsis:
        case Slot::Thesis: return SyllableWeight::Long;
        case Slot::Breve1:
        case Slot::Breve2: return SyllableWeight::Short;
        case Slot::Anceps: return SyllableWeight::Anceps;
    }
    return SyllableWeight::Anceps;
}

std::string normalize_word(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (u >= 0x80) {
            out += c;
            continue;
        }
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c < 'a' || c > 'z') continue;
        if (c == 'v') c = 'u';
        if (c == 'j') c = 'i';
        out += c;
    }
    return out;
}

AccentConfig AccentConfig::defaults() {
    AccentConfig cfg;
    cfg.unaccented_words = {"a",  "ab", "ac", "ad",  "at",  "aut", "cum", "de", "e",   "et",  "ex",
                            "in", "ne", "nec", "neu", "ob", "per", "sed", "seu", "si", "sub", "ut"};
    cfg.enclitics = {"que", "ue", "ne"};
    cfg.enclitic_exceptions = {"atque", "denique", "itaque", "namque", "neque", "quaeque", "quandoque",
                               "quisque", "quoque", "undique", "usque", "utique", "bene", "pone",
                               "paene", "plane", "sine", "*ane", "*ene", "*ine", "*one", "*une"};
    return cfg;
}

namespace {

std::set<std::string> normalized_set(const nlohmann::json& arr) {
    std::set<std::string> out;
    for (const auto& v : arr) {
        const auto s = v.get<std::string>();
        // Keep the leading '*' of suffix patterns.
        if (!s.empty() && s[0] == '*') {
            out.insert("*" + normalize_word(s.substr(1)));
        } else {
            out.insert(normalize_word(s));
        }
    }
    return out;
}

}  // namespace

AccentConfig AccentConfig::from_json(std::string_view text) {
    AccentConfig cfg = defaults();
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.contains("unaccented_words")) cfg.unaccented_words = normalized_set(j.at("unaccented_words"));
        if (j.contains("enclitics")) cfg.enclitics = normalized_set(j.at("enclitics"));
        if (j.contains("enclitic_exceptions")) {
            cfg.enclitic_exceptions = normalized_set(j.at("enclitic_exceptions"));
        }
        if (j.contains("accent_overrides")) {
            cfg.accent_overrides.clear();
            for (const auto& [word, idx] : j.at("accent_overrides").items()) {
                const int i = idx.get<int>();
                if (i < 0) throw DataError("accent override for '" + word + "' is negative");
                cfg.accent_overrides[normalize_word(word)] = i;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("accent config: ") + e.what());
    }
    return cfg;
}

AccentConfig AccentConfig::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

std::string AccentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["unaccented_words"] = unaccented_words;
    j["enclitics"] = enclitics;
    j["enclitic_exceptions"] = enclitic_exceptions;
    j["accent_overrides"] = nlohmann::ordered_json::object();
    for (const auto& [w, i] : accent_overrides) j["accent_overrides"][w] = i;
    return j.dump(2);
}

bool AccentConfig::is_enclitic_exception(const std::string& normalized) const {
    if (enclitic_exceptions.contains(normalized)) return true;
    for (const auto& e : enclitic_exceptions) {
        if (e.size() > 1 && e[0] == '*') {
            const std::string_view suffix(e.data() + 1, e.size() - 1);
            if (normalized.size() > suffix.size() && normalized.ends_with(suffix)) return true;
        }
    }
    return false;
}

namespace {

// Penult if heavy, else antepenult; short words take the first syllable.
std::size_t regular_accent(const ScannedWord& word, std::size_t n_syllables) {
    if (n_syllables <= 2) return 0;
    const std::size_t penult = n_syllables - 2;
    // The penult always survives elision, which only removes the final syllable.
    if (penult < word.syllables.size() && syllable_weight(word.syllables[penult]) == SyllableWeight::Long) {
        return penult;
    }
    return n_syllables - 3;
}

}  // namespace

std::optional<std::size_t> accent_index(const ScannedWord& word, const AccentConfig& cfg) {
    const std::size_t surviving = word.syllables.size();
    if (surviving == 0) return std::nullopt;
    const std::size_t total = surviving + (word.elision == Elision::Synalepha ? 1 : 0);

    const std::string form = normalize_word(word.text);
    if (cfg.unaccented_words.contains(form)) return std::nullopt;

    std::size_t index;
    if (const auto it = cfg.accent_overrides.find(form); it != cfg.accent_overrides.end()) {
        index = std::min(static_cast<std::size_t>(it->second), total - 1);
    } else {
        std::size_t stem = total;
        if (total >= 2 && !cfg.is_enclitic_exception(form)) {
            // Longest matching enclitic wins ("que" before "ue").
            std::size_t best = 0;
            for (const auto& enc : cfg.enclitics) {
                if (form.size() > enc.size() && form.ends_with(enc)) best = std::max(best, enc.size());
            }
            if (best > 0) stem = total - 1;
        }
        index = regular_accent(word, stem);
    }

    if (index >= surviving) return std::nullopt;
    return index;
}

bool AccentedLine::is_accented(MetricalPosition p) const {
    return std::binary_search(accented_positions.begin(), accented_positions.end(), p);
}

AccentedLine accented_positions(const ScannedLine& line, const AccentConfig& cfg) {
    AccentedLine out;
    out.line = &line;
    for (const auto& w : line.words) {
        if (const auto idx = accent_index(w, cfg)) out.accented_positions.push_back(w.syllables[*idx]);
    }
    std::sort(out.accented_positions.begin(), out.accented_positions.end());
    return out;
}

}  // namespace hexmeter
