#include "hexmeter/corpus.hpp"

#include "hexmeter/error.hpp"
#include "hexmeter/xml.hpp"

#include <json.hpp>

#include <array>

namespace hexmeter {

using ojson = nlohmann::ordered_json;

char slot_letter(Slot s) {
    switch (s) {
        case Slot::Arsis: return 'A';
        case Slot::Thesis: return 'T';
        case Slot::Breve1: return 'b';
        case Slot::Breve2: return 'c';
        case Slot::Anceps: return 'X';
    }
    return '?';
}

std::optional<Slot> slot_from_letter(char c) {
    switch (c) {
        case 'A': return Slot::Arsis;
        case 'T': return Slot::Thesis;
        case 'b': return Slot::Breve1;
        case 'c': return Slot::Breve2;
        case 'X': return Slot::Anceps;
        default: return std::nullopt;
    }
}

std::string MetricalPosition::code() const {
    return std::string{static_cast<char>('0' + foot), slot_letter(slot)};
}

std::optional<std::string> parse_syllables(std::string_view sy, std::vector<MetricalPosition>& out) {
    out.clear();
    if (sy.size() % 2 != 0) return "syllable code '" + std::string(sy) + "' has odd length";
    for (std::size_t i = 0; i < sy.size(); i += 2) {
        const char f = sy[i];
        if (f < '1' || f > '6') {
            return "foot '" + std::string(1, f) + "' out of range in '" + std::string(sy) + "'";
        }
        const auto slot = slot_from_letter(sy[i + 1]);
        if (!slot) {
            return "unknown slot letter '" + std::string(1, sy[i + 1]) + "' in '" + std::string(sy) + "'";
        }
        if (*slot == Slot::Anceps && f != '6') {
            return "anceps outside the sixth foot in '" + std::string(sy) + "'";
        }
        out.push_back({f - '0', *slot});
    }
    return std::nullopt;
}

std::string syllables_code(const std::vector<MetricalPosition>& syllables) {
    std::string out;
    out.reserve(syllables.size() * 2);
    for (const auto& p : syllables) out += p.code();
    return out;
}

std::string ScannedLine::label() const { return division.empty() ? name : division + ":" + name; }

WordBreak word_break_from_code(std::string_view code) {
    if (code.empty()) return WordBreak::None;
    if (code == "CM") return WordBreak::StrongCaesura;
    if (code == "CF") return WordBreak::WeakCaesura;
    if (code == "DI") return WordBreak::Diaeresis;
    return WordBreak::Other;
}

Elision elision_from_code(std::string_view code, const ParserConfig& cfg) {
    if (!code.empty() && code == cfg.synalepha_value) return Elision::Synalepha;
    if (!code.empty() && code == cfg.prodelision_value) return Elision::Prodelision;
    return Elision::None;
}

namespace {

std::string trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

// Builds words and checks per-word structure; returns a rejection reason.
std::optional<std::string> build_words(ScannedLine& line, const std::vector<const xml::Element*>& words,
                                       const ParserConfig& cfg, std::vector<std::string>& warnings) {
    for (std::size_t i = 0; i < words.size(); ++i) {
        const xml::Element& el = *words[i];
        ScannedWord w;
        w.text = trim(el.text);
        if (auto err = parse_syllables(el.attribute("sy").value_or(""), w.syllables)) {
            return "word " + std::to_string(i + 1) + ": " + *err;
        }
        w.wb_code = std::string(el.attribute("wb").value_or(""));
        w.word_break = word_break_from_code(w.wb_code);
        w.mf_code = std::string(el.attribute(cfg.elision_attribute).value_or(""));
        w.elision = elision_from_code(w.mf_code, cfg);

        if (w.syllables.empty() && w.elision == Elision::None) {
            return "word " + std::to_string(i + 1) + " ('" + w.text + "') has no syllables";
        }
        const bool last = i + 1 == words.size();
        if (w.word_break == WordBreak::Other) {
            warnings.push_back("line " + line.label() + ": unknown wb code '" + w.wb_code + "' on '" +
                               w.text + "', treated as diaeresis");
        } else if (w.word_break == WordBreak::None && !last) {
            warnings.push_back("line " + line.label() + ": word '" + w.text + "' has no wb code");
        }
        line.words.push_back(std::move(w));
    }
    return std::nullopt;
}

void collect_lines(const xml::Element& el, const std::string& division, const ParserConfig& cfg,
                   ScannedCorpus& out) {
    for (const auto& child : el.children) {
        if (child.name == cfg.line_element) {
            ScannedLine line;
            line.name = std::string(child.attribute("name").value_or(""));
            line.division = division;
            line.metre = std::string(child.attribute("metre").value_or(""));
            line.pattern = std::string(child.attribute("pattern").value_or(""));

            if (line.metre != "H") {
                out.skipped.push_back({line.label(), "non-hexameter (metre=\"" + line.metre + "\")"});
                continue;
            }
            std::vector<const xml::Element*> words;
            for (const auto& w : child.children) {
                if (w.name == cfg.word_element) words.push_back(&w);
            }
            if (auto reason = build_words(line, words, cfg, out.warnings)) {
                out.skipped.push_back({line.label(), *reason});
                continue;
            }
            const auto violations = validate_line(line);
            if (!violations.empty()) {
                std::string reason;
                for (const auto& v : violations) {
                    if (!reason.empty()) reason += "; ";
                    reason += v;
                }
                out.skipped.push_back({line.label(), reason});
                continue;
            }
            out.lines.push_back(std::move(line));
        } else if (child.name == cfg.division_element) {
            const auto title = child.attribute(cfg.division_title_attribute);
            collect_lines(child, title ? std::string(*title) : division, cfg, out);
        } else {
            collect_lines(child, division, cfg, out);
        }
    }
}

std::string slots_string(const std::vector<Slot>& slots) {
    std::string s;
    for (Slot x : slots) {
        if (!s.empty()) s += ' ';
        s += slot_letter(x);
    }
    return s.empty() ? "nothing" : s;
}

}  // namespace

ScannedCorpus parse_document(std::string_view xml_text, std::string source_id, const ParserConfig& cfg) {
    const xml::Element root = xml::parse(xml_text);
    ScannedCorpus corpus;
    corpus.source_id = std::move(source_id);
    if (root.name == cfg.line_element) {
        xml::Element wrapper;
        wrapper.children.push_back(root);
        collect_lines(wrapper, "", cfg, corpus);
    } else {
        collect_lines(root, "", cfg, corpus);
    }
    return corpus;
}

std::vector<std::string> validate_line(const ScannedLine& line) {
    std::vector<std::string> violations;

    const bool pattern_ok = line.pattern.size() == 4 &&
                            line.pattern.find_first_not_of("DS") == std::string::npos;
    if (!pattern_ok) violations.push_back("pattern '" + line.pattern + "' is not four characters over D/S");

    std::array<std::vector<Slot>, 7> feet;
    const MetricalPosition* prev = nullptr;
    bool order_reported = false;
    for (const auto& w : line.words) {
        for (const auto& p : w.syllables) {
            if (prev && !(*prev < p) && !order_reported) {
                violations.push_back("syllable " + p.code() + " follows " + prev->code() + " out of order");
                order_reported = true;
            }
            prev = &p;
            feet[static_cast<std::size_t>(p.foot)].push_back(p.slot);
        }
    }

    const std::vector<Slot> spondee{Slot::Arsis, Slot::Thesis};
    const std::vector<Slot> dactyl{Slot::Arsis, Slot::Breve1, Slot::Breve2};
    const std::vector<Slot> final_foot{Slot::Arsis, Slot::Anceps};

    for (int f = 1; f <= 4; ++f) {
        const auto& got = feet[static_cast<std::size_t>(f)];
        if (pattern_ok) {
            const bool is_spondee = line.pattern[static_cast<std::size_t>(f - 1)] == 'S';
            const auto& want = is_spondee ? spondee : dactyl;
            if (got != want) {
                violations.push_back("foot " + std::to_string(f) + ": expected " +
                                     (is_spondee ? "spondee" : "dactyl") + " (" + slots_string(want) +
                                     "), found " + slots_string(got));
            }
        } else if (got != spondee && got != dactyl) {
            violations.push_back("foot " + std::to_string(f) + ": expected dactyl or spondee, found " +
                                 slots_string(got));
        }
    }
    if (feet[5] != dactyl && feet[5] != spondee) {
        violations.push_back("foot 5: expected dactyl (A b c) or spondee (A T), found " + slots_string(feet[5]));
    }
    if (feet[6] != final_foot) {
        violations.push_back("foot 6: expected (A X), found " + slots_string(feet[6]));
    }
    return violations;
}

std::string corpus_to_json(const ScannedCorpus& corpus, int indent) {
    ojson j;
    j["source_id"] = corpus.source_id;
    j["lines"] = ojson::array();
    for (const auto& line : corpus.lines) {
        ojson l;
        l["name"] = line.label();
        l["pattern"] = line.pattern;
        l["words"] = ojson::array();
        for (const auto& w : line.words) {
            ojson wj;
            wj["text"] = w.text;
            wj["sy"] = syllables_code(w.syllables);
            wj["wb"] = w.wb_code;
            wj["mf"] = w.mf_code;
            l["words"].push_back(std::move(wj));
        }
        j["lines"].push_back(std::move(l));
    }
    j["skipped"] = ojson::array();
    for (const auto& s : corpus.skipped) j["skipped"].push_back({{"name", s.name}, {"reason", s.reason}});
    return j.dump(indent);
}

ScannedCorpus corpus_from_json(std::string_view text, const ParserConfig& cfg) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("corpus JSON: ") + e.what());
    }
    try {
        ScannedCorpus corpus;
        corpus.source_id = j.at("source_id").get<std::string>();
        for (const auto& l : j.at("lines")) {
            ScannedLine line;
            const auto name = l.at("name").get<std::string>();
            if (const auto colon = name.find(':'); colon != std::string::npos) {
                line.division = name.substr(0, colon);
                line.name = name.substr(colon + 1);
            } else {
                line.name = name;
            }
            line.pattern = l.at("pattern").get<std::string>();
            for (const auto& wj : l.at("words")) {
                ScannedWord w;
                w.text = wj.at("text").get<std::string>();
                if (auto err = parse_syllables(wj.at("sy").get<std::string>(), w.syllables)) {
                    throw DataError("corpus JSON line " + name + ": " + *err);
                }
                w.wb_code = wj.at("wb").get<std::string>();
                w.word_break = word_break_from_code(w.wb_code);
                w.mf_code = wj.at("mf").get<std::string>();
                w.elision = elision_from_code(w.mf_code, cfg);
                line.words.push_back(std::move(w));
            }
            corpus.lines.push_back(std::move(line));
        }
        for (const auto& s : j.at("skipped")) {
            corpus.skipped.push_back({s.at("name").get<std::string>(), s.at("reason").get<std::string>()});
        }
        return corpus;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("corpus JSON: ") + e.what());
    }
}

}  // namespace hexmeter
