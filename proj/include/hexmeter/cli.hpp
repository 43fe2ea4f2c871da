#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace hexmeter::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct InputDigest {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    std::uint64_t seed = 0;
    std::string prng_id;
    std::string toolkit_version;
    std::vector<InputDigest> inputs;
    std::string timestamp;  // UTC, ISO 8601; SOURCE_DATE_EPOCH overrides the clock

    nlohmann::ordered_json to_json() const;
};

// Strips manifest lines ("# manifest: ...", {"manifest": ...}) and the
// "manifest" member of JSON documents, leaving the data section.
std::string data_section(const std::string& artifact);

// Runs the command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hexmeter::cli
