#pragma once

#include "hexmeter/corpus.hpp"
#include "hexmeter/features.hpp"
#include "hexmeter/linalg.hpp"
#include "hexmeter/rng.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

namespace testing {

inline constexpr const char* kLine952 = R"(<line name="952" metre="H" pattern="DDDS">
    <word sy="1A1b1c" wb="DI">Vitaque</word>
    <word sy="2A" wb="CM">cum</word>
    <word sy="2b2c3A" wb="CM">gemitu</word>
    <word sy="3b3c" wb="DI">fugit</word>
    <word sy="4A4T5A5b" wb="CF">indignata</word>
    <word sy="5c" wb="DI">sub</word>
    <word sy="6A6X">umbras.</word>
</line>
)";

inline const std::array<double, 16> kLine952Features{0, 0, 0, 1, 0, 1, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0};

inline hexmeter::ScannedLine line_952() {
    return hexmeter::parse_document(kLine952, "fixture").lines.at(0);
}

// Lines whose binary features are independent Bernoulli draws with the given
// probabilities; SYN (column 15) is Binomial(2, p[15]).
inline std::vector<hexmeter::FeatureVector> bernoulli_lines(std::size_t n, const std::array<double, 16>& p,
                                                            std::uint64_t seed) {
    hexmeter::Rng rng(seed);
    std::vector<hexmeter::FeatureVector> out(n);
    for (auto& v : out) {
        for (std::size_t f = 0; f < 15; ++f) v[f] = rng.uniform() < p[f] ? 1.0 : 0.0;
        v[15] = (rng.uniform() < p[15] ? 1.0 : 0.0) + (rng.uniform() < p[15] ? 1.0 : 0.0);
    }
    return out;
}

inline std::array<double, 16> base_profile() {
    return {0.55, 0.6, 0.45, 0.35, 0.2, 0.55, 0.6, 0.65, 0.25, 0.4, 0.75, 0.3, 0.15, 0.2, 0.45, 0.3};
}

// `base` with the first `count` features shifted by +delta (or -delta when
// the shift would leave [0.05, 0.95]).
inline std::array<double, 16> shifted_profile(std::array<double, 16> base, std::size_t count, double delta) {
    for (std::size_t f = 0; f < count; ++f) base[f] = base[f] + delta <= 0.95 ? base[f] + delta : base[f] - delta;
    return base;
}

// Random symmetric positive-definite matrix A A^T + d I.
inline hexmeter::Matrix random_spd(std::size_t n, hexmeter::Rng& rng, double diag = 0.1) {
    hexmeter::Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform() * 2.0 - 1.0;
    }
    hexmeter::Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(i, k) * a(j, k);
            out(i, j) = s + (i == j ? diag : 0.0);
        }
    }
    return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hexmeter_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
