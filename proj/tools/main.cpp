#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "setmarkov/error.hpp"

namespace {

using namespace setmarkov;
using namespace setmarkov::cli;

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsageError = 2;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> count;
    std::string out;
    std::vector<double> eps;
    std::string toleranceOverrides;
    unsigned threads = 1;
};

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw ConfigError("", "cannot write output file '" + path + "'");
    }
    file << text;
    if (!file) {
        throw ConfigError("", "failed writing output file '" + path + "'");
    }
}

ExperimentConfig load(const Flags& flags) {
    ExperimentConfig cfg = loadConfig(flags.config);
    if (!flags.toleranceOverrides.empty()) {
        std::ifstream in(flags.toleranceOverrides);
        if (!in) {
            throw ConfigError("", "cannot open tolerance overrides '" + flags.toleranceOverrides + "'");
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("", std::string("malformed tolerance overrides: ") + e.what());
        }
        applyToleranceOverrides(cfg.tolerances, doc);
    }
    return cfg;
}

std::uint64_t requireSeed(const Flags& flags, const ExperimentConfig& cfg) {
    if (flags.seed) {
        return *flags.seed;
    }
    if (cfg.seed) {
        return *cfg.seed;
    }
    throw ConfigError("/seed", "a seed is required for sampling (config field or --seed)");
}

int runValidate(const Flags& flags) {
    ExperimentConfig cfg = load(flags);
    std::uint64_t seed = 0;
    if (!cfg.model().finiteState() || flags.seed || cfg.seed) {
        seed = requireSeed(flags, cfg);
    }
    nlohmann::json report = validateReport(cfg, seed, flags.threads);
    emit(report.dump(2) + "\n", flags.out);
    if (!report["pass"].get<bool>()) {
        for (const auto& c : report["checks"]) {
            if (!c["pass"].get<bool>()) {
                std::cerr << "FAIL " << c["name"].get<std::string>() << " " << c["instance"].get<std::string>()
                          << " defect " << formatReal(c["defect"].get<double>()) << "\n";
            }
        }
        return kCheckFailure;
    }
    return kPass;
}

int runSample(const Flags& flags) {
    ExperimentConfig cfg = load(flags);
    std::uint64_t seed = requireSeed(flags, cfg);
    std::size_t count = flags.count ? *flags.count : cfg.count.value_or(1000);
    std::ostringstream csv;
    writeSampleCsv(cfg, seed, count, flags.threads, csv);
    emit(csv.str(), flags.out);
    return kPass;
}

int runFdd(const Flags& flags) {
    ExperimentConfig cfg = load(flags);
    std::ostringstream csv;
    writeFddCsv(cfg, csv);
    emit(csv.str(), flags.out);
    return kPass;
}

int runGencheck(const Flags& flags) {
    ExperimentConfig cfg = load(flags);
    std::vector<double> eps = flags.eps.empty() ? cfg.gencheck.eps : flags.eps;
    for (double e : eps) {
        if (!(e > 0.0)) {
            throw ConfigError("", "--eps values must be positive");
        }
    }
    nlohmann::json report = gencheckReport(cfg, eps);
    emit(report.dump(2) + "\n", flags.out);
    return report["pass"].get<bool>() ? kPass : kCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Construct, sample and verify set-indexed Markov processes on finite grids"};
    app.require_subcommand(1);
    Flags flags;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output path (default stdout)");
        sub->add_option("--tolerance-overrides", flags.toleranceOverrides, "JSON object of tolerance overrides")
            ->check(CLI::ExistingFile);
        sub->add_option("--threads", flags.threads, "worker threads for sampling")->check(CLI::Range(1u, 256u));
    };
    auto* validate = app.add_subcommand("validate", "run the invariant suite and print a JSON report");
    common(validate);
    validate->add_option("--seed", flags.seed, "seed for Monte Carlo checks");
    auto* sample = app.add_subcommand("sample", "write sampled increments as CSV");
    common(sample);
    sample->add_option("--seed", flags.seed, "sampling seed");
    sample->add_option("--n", flags.count, "number of samples")->check(CLI::PositiveNumber);
    auto* fdd = app.add_subcommand("fdd", "write the exact joint pmf as CSV");
    common(fdd);
    auto* gencheck = app.add_subcommand("gencheck", "check the generator along the canonical flow");
    common(gencheck);
    gencheck->add_option("--eps", flags.eps, "finite-difference steps")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kUsageError;
    }

    try {
        if (*validate) {
            return runValidate(flags);
        }
        if (*sample) {
            return runSample(flags);
        }
        if (*fdd) {
            return runFdd(flags);
        }
        return runGencheck(flags);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kUsageError;
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kUsageError;
    } catch (const setmarkov::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
}
