#pragma once

// Per-line feature files, the interchange format between CLI commands.
//
// CSV: "source_id,name,F1S,...,SYN" header, one row per line.
// JSONL: one object per line with the same keys.
// '#' lines and {"manifest": ...} objects are skipped on reading.

#include "hexmeter/features.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hexmeter {

struct FeatureRow {
    std::string source_id;
    std::string name;
    FeatureVector values;
};

enum class FeatureFormat { Csv, Jsonl };

// Six significant digits, '.' decimal, no locale.
std::string format_number(double v);

void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows);
void write_features_jsonl(std::ostream& out, const std::vector<FeatureRow>& rows);

std::vector<FeatureRow> parse_features(std::string_view text);
std::vector<FeatureRow> read_features(const std::filesystem::path& path);

std::vector<FeatureVector> vectors_of(const std::vector<FeatureRow>& rows);

}  // namespace hexmeter
