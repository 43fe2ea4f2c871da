#include "hexmeter/feature_io.hpp"

#include "hexmeter/digest.hpp"
#include "hexmeter/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <ostream>

namespace hexmeter {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw DataError("feature file line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
    out << "source_id,name";
    for (auto n : feature_names()) out << ',' << n;
    out << '\n';
    for (const auto& r : rows) {
        out << csv_field(r.source_id) << ',' << csv_field(r.name);
        for (double v : r.values.values) out << ',' << format_number(v);
        out << '\n';
    }
}

void write_features_jsonl(std::ostream& out, const std::vector<FeatureRow>& rows) {
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["source_id"] = r.source_id;
        j["name"] = r.name;
        for (std::size_t i = 0; i < kFeatureCount; ++i) j[std::string(feature_names()[i])] = r.values[i];
        out << j.dump() << '\n';
    }
}

std::vector<FeatureRow> parse_features(std::string_view text) {
    std::vector<FeatureRow> rows;
    std::vector<std::size_t> columns;  // feature index -> csv column
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '{') {
            try {
                const auto j = nlohmann::json::parse(line);
                if (j.contains("manifest")) continue;
                FeatureRow r;
                r.source_id = j.at("source_id").get<std::string>();
                r.name = j.at("name").get<std::string>();
                for (std::size_t i = 0; i < kFeatureCount; ++i) {
                    r.values[i] = j.at(std::string(feature_names()[i])).get<double>();
                }
                rows.push_back(std::move(r));
            } catch (const nlohmann::json::exception& e) {
                throw DataError("feature file line " + std::to_string(line_no) + ": " + e.what());
            }
            continue;
        }

        const auto fields = split_csv(line);
        if (!have_header) {
            if (fields.size() < 2 || fields[0] != "source_id" || fields[1] != "name") {
                throw DataError("feature file: header must start with source_id,name");
            }
            columns.assign(kFeatureCount, 0);
            for (std::size_t i = 0; i < kFeatureCount; ++i) {
                bool found = false;
                for (std::size_t c = 2; c < fields.size(); ++c) {
                    if (fields[c] == feature_names()[i]) {
                        columns[i] = c;
                        found = true;
                    }
                }
                if (!found) {
                    throw DataError("feature file: missing column " + std::string(feature_names()[i]));
                }
            }
            have_header = true;
            continue;
        }
        if (fields.size() < 2 + kFeatureCount) {
            throw DataError("feature file line " + std::to_string(line_no) + ": expected " +
                            std::to_string(2 + kFeatureCount) + " fields");
        }
        FeatureRow r;
        r.source_id = fields[0];
        r.name = fields[1];
        for (std::size_t i = 0; i < kFeatureCount; ++i) r.values[i] = parse_double(fields[columns[i]], line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<FeatureRow> read_features(const std::filesystem::path& path) { return parse_features(read_file(path)); }

std::vector<FeatureVector> vectors_of(const std::vector<FeatureRow>& rows) {
    std::vector<FeatureVector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.values);
    return out;
}

}  // namespace hexmeter
