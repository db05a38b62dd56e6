#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace setmarkov::cli {

inline constexpr const char* kToolName = "setmarkov";
inline constexpr const char* kToolVersion = "0.1.0";

/// Runs the invariant suite; report["pass"] is true iff every check passes.
nlohmann::json validateReport(const ExperimentConfig& cfg, std::uint64_t seed, unsigned threads);

/// One row per sample: the increments over C_0..C_n, then the derived sets.
void writeSampleCsv(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t count, unsigned threads,
                    std::ostream& out);

/// Exact joint pmf over the canonical left neighbourhoods, or over experiment.tuple when given.
void writeFddCsv(const ExperimentConfig& cfg, std::ostream& out);

/// Finite-difference and integral-identity checks for the generator along the canonical flow.
nlohmann::json gencheckReport(const ExperimentConfig& cfg, const std::vector<double>& eps);

/// printf("%.17g")
std::string formatReal(double v);

} // namespace setmarkov::cli
