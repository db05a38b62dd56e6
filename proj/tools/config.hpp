#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "setmarkov/construction.hpp"
#include "setmarkov/generators.hpp"
#include "setmarkov/grid.hpp"
#include "setmarkov/kernel.hpp"
#include "setmarkov/semilattice.hpp"

namespace setmarkov::cli {

/// A configuration problem located by a JSON pointer into the config document.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string pointer, const std::string& message)
        : std::runtime_error("config error at " + (pointer.empty() ? std::string("<root>") : pointer) + ": " + message),
          pointer_(std::move(pointer)) {}

    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

struct Tolerances {
    double exact = 1e-10;
    double quadrature = 1e-7;
    double dirichlet = 1e-4;
    double mcSe = 3.0;
};

struct GencheckOptions {
    double s = 0.0;
    std::optional<double> t;
    std::optional<std::string> h;
    KnotSide side = KnotSide::right;
    std::vector<double> eps{1e-2, 5e-3, 2.5e-3};
};

/// X over set minus, or over set when minus is absent.
struct DerivedSet {
    std::string name;
    IndexedSet set;
    std::optional<IndexedSet> minus;
};

struct ExperimentConfig {
    nlohmann::json document;
    GridPtr grid;
    LatticePtr lattice;
    std::optional<ProcessModel> process;
    std::vector<DerivedSet> derived;
    std::vector<IndexedSet> tuple;
    GencheckOptions gencheck;
    std::size_t mcSamples = 100000;
    std::size_t orderingCap = 10000;
    std::optional<std::size_t> count;
    std::optional<std::uint64_t> seed;
    Tolerances tolerances;

    const ProcessModel& model() const { return *process; }
    /// FNV-1a of the compact serialization of the parsed document.
    std::string hash() const;
};

ExperimentConfig parseConfig(const nlohmann::json& document);
/// Reads and parses a config file; malformed JSON is reported at the root pointer.
ExperimentConfig loadConfig(const std::string& path);

/// Applies {"exact", "quadrature", "dirichlet", "mc_se"} entries from an overrides document.
void applyToleranceOverrides(Tolerances& tol, const nlohmann::json& overrides, const std::string& pointer = "");

std::uint64_t fnv1a(const std::string& bytes);

} // namespace setmarkov::cli
