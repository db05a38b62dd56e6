#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "setmarkov/error.hpp"

namespace setmarkov::cli {

namespace {

using nlohmann::json;

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& requireField(const json& obj, const std::string& ptr, const std::string& key) {
    if (!obj.is_object()) {
        throw ConfigError(ptr, "expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(child(ptr, key), "missing required field");
    }
    return *it;
}

const json* optionalField(const json& obj, const std::string& key) {
    if (!obj.is_object()) {
        return nullptr;
    }
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double asNumber(const json& v, const std::string& ptr) {
    if (!v.is_number()) {
        throw ConfigError(ptr, "expected a number");
    }
    return v.get<double>();
}

std::size_t asCount(const json& v, const std::string& ptr) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(ptr, "expected a nonnegative integer");
    }
    return v.get<std::size_t>();
}

std::string asString(const json& v, const std::string& ptr) {
    if (!v.is_string()) {
        throw ConfigError(ptr, "expected a string");
    }
    return v.get<std::string>();
}

bool asBool(const json& v, const std::string& ptr) {
    if (!v.is_boolean()) {
        throw ConfigError(ptr, "expected a boolean");
    }
    return v.get<bool>();
}

const json& asArray(const json& v, const std::string& ptr) {
    if (!v.is_array()) {
        throw ConfigError(ptr, "expected an array");
    }
    return v;
}

std::vector<std::size_t> asCounts(const json& v, const std::string& ptr) {
    std::vector<std::size_t> out;
    const json& arr = asArray(v, ptr);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        out.push_back(asCount(arr[i], child(ptr, i)));
    }
    return out;
}

std::vector<std::size_t> asCorner(const json& v, const std::string& ptr, const GroundGrid& grid) {
    auto corner = asCounts(v, ptr);
    if (corner.size() != grid.dims()) {
        throw ConfigError(ptr, "corner needs " + std::to_string(grid.dims()) + " coordinates");
    }
    for (std::size_t a = 0; a < corner.size(); ++a) {
        if (corner[a] >= grid.extents()[a]) {
            throw ConfigError(child(ptr, a), "coordinate outside the grid");
        }
    }
    return corner;
}

IndexedSet parseSet(const json& v, const std::string& ptr, const GridPtr& grid) {
    if (!v.is_object() || v.size() != 1) {
        throw ConfigError(ptr, "expected an object with exactly one of cells, rectangle, lowerLayer, full");
    }
    if (const json* cells = optionalField(v, "cells")) {
        auto ids = asCounts(*cells, child(ptr, "cells"));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] >= grid->cellCount()) {
                throw ConfigError(child(child(ptr, "cells"), i), "cell index outside the grid");
            }
        }
        return IndexedSet::fromCells(grid, ids);
    }
    if (const json* rect = optionalField(v, "rectangle")) {
        auto corner = asCorner(*rect, child(ptr, "rectangle"), *grid);
        return IndexedSet::rectangle(grid, corner);
    }
    if (const json* layer = optionalField(v, "lowerLayer")) {
        std::string lp = child(ptr, "lowerLayer");
        const json& arr = asArray(*layer, lp);
        if (arr.empty()) {
            throw ConfigError(lp, "a lower layer needs at least one corner");
        }
        std::vector<std::vector<std::size_t>> corners;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            corners.push_back(asCorner(arr[i], child(lp, i), *grid));
        }
        return IndexedSet::lowerLayer(grid, corners);
    }
    if (const json* full = optionalField(v, "full")) {
        if (!asBool(*full, child(ptr, "full"))) {
            throw ConfigError(child(ptr, "full"), "full must be true");
        }
        return IndexedSet::full(grid);
    }
    throw ConfigError(ptr, "expected one of cells, rectangle, lowerLayer, full");
}

MeasureKind measureKindFor(KernelKind kind) {
    switch (kind) {
    case KernelKind::empirical:
        return MeasureKind::probability;
    case KernelKind::dirichlet:
        return MeasureKind::dirichlet;
    default:
        return MeasureKind::intensity;
    }
}

CellMeasure parseMeasure(const json* v, const std::string& ptr, const GridPtr& grid, KernelKind kind) {
    MeasureKind mk = measureKindFor(kind);
    const double cells = static_cast<double>(grid->cellCount());
    try {
        if (v == nullptr) {
            return kind == KernelKind::empirical ? CellMeasure::uniformProbability(grid)
                                                 : CellMeasure::constant(grid, 1.0, mk);
        }
        if (!v->is_object() || v->size() != 1) {
            throw ConfigError(ptr, "expected an object with exactly one of weights, constant, total");
        }
        if (const json* w = optionalField(*v, "weights")) {
            std::string wp = child(ptr, "weights");
            const json& arr = asArray(*w, wp);
            if (arr.size() != grid->cellCount()) {
                throw ConfigError(wp, "expected one weight per cell (" + std::to_string(grid->cellCount()) + ")");
            }
            std::vector<double> weights;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                weights.push_back(asNumber(arr[i], child(wp, i)));
            }
            return CellMeasure(grid, std::move(weights), mk);
        }
        if (const json* c = optionalField(*v, "constant")) {
            return CellMeasure::constant(grid, asNumber(*c, child(ptr, "constant")), mk);
        }
        if (const json* t = optionalField(*v, "total")) {
            return CellMeasure::constant(grid, asNumber(*t, child(ptr, "total")) / cells, mk);
        }
        throw ConfigError(ptr, "expected one of weights, constant, total");
    } catch (const Error& e) {
        throw ConfigError(ptr, e.what());
    }
}

CountPmf parseJumps(const json& v, const std::string& ptr) {
    CountPmf out;
    const json& arr = asArray(v, ptr);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        std::string ip = child(ptr, i);
        if (!arr[i].is_array() || arr[i].size() != 2 || !arr[i][0].is_number_integer()) {
            throw ConfigError(ip, "expected [integer jump, probability]");
        }
        out.emplace_back(arr[i][0].get<std::int64_t>(), asNumber(arr[i][1], child(ip, 1)));
    }
    return out;
}

TransitionKernel parseKernel(const json& proc, const json& overrides, const std::string& ptr,
                             const std::string& measurePtr, const GridPtr& grid, KernelKind kind) {
    auto pick = [&](const std::string& key) -> std::pair<const json*, std::string> {
        if (const json* o = optionalField(overrides, key)) {
            return {o, child(measurePtr, key)};
        }
        return {optionalField(proc, key), child(ptr, key)};
    };
    auto [measureJson, mp] = pick("measure");
    CellMeasure measure = parseMeasure(measureJson, mp, grid, kind);

    InitialChoice initial = InitialChoice::marginal;
    if (const json* init = optionalField(proc, "initial")) {
        std::string s = asString(*init, child(ptr, "initial"));
        if (s == "zero") {
            initial = InitialChoice::zero;
        } else if (s != "marginal") {
            throw ConfigError(child(ptr, "initial"), "expected \"marginal\" or \"zero\"");
        }
    }
    try {
        switch (kind) {
        case KernelKind::gaussian:
            return TransitionKernel::gaussian(measure, initial);
        case KernelKind::poisson:
            return TransitionKernel::poisson(measure, initial);
        case KernelKind::compoundPoisson: {
            const json& jumps = requireField(proc, ptr, "jumps");
            return TransitionKernel::compoundPoisson(measure, parseJumps(jumps, child(ptr, "jumps")), initial);
        }
        case KernelKind::empirical: {
            auto [nJson, np] = pick("n");
            if (nJson == nullptr) {
                throw ConfigError(child(ptr, "n"), "missing required field");
            }
            std::size_t n = asCount(*nJson, np);
            if (n < 1) {
                throw ConfigError(np, "n must be at least 1");
            }
            bool corrupted = false;
            auto [cJson, cp] = pick("corrupted");
            if (cJson != nullptr) {
                corrupted = asBool(*cJson, cp);
            }
            return TransitionKernel::empirical(static_cast<int>(n), measure, corrupted);
        }
        case KernelKind::dirichlet:
            return TransitionKernel::dirichlet(measure);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(ptr, e.what());
    }
    throw ConfigError(child(ptr, "kind"), "unknown kernel kind");
}

ProcessModel parseProcess(const json& proc, const std::string& ptr, const GridPtr& grid) {
    if (!proc.is_object()) {
        throw ConfigError(ptr, "expected an object");
    }
    std::string kindName = asString(requireField(proc, ptr, "kind"), child(ptr, "kind"));
    KernelKind kind;
    try {
        kind = kernelKindFromString(kindName);
    } catch (const Error& e) {
        throw ConfigError(child(ptr, "kind"), e.what());
    }
    if (const json* comps = optionalField(proc, "components")) {
        std::string cp = child(ptr, "components");
        const json& arr = asArray(*comps, cp);
        if (arr.empty()) {
            throw ConfigError(cp, "a mixture needs at least one component");
        }
        std::vector<ProcessModel::Component> components;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string ip = child(cp, i);
            if (!arr[i].is_object()) {
                throw ConfigError(ip, "expected an object");
            }
            double w = asNumber(requireField(arr[i], ip, "weight"), child(ip, "weight"));
            components.push_back({w, parseKernel(proc, arr[i], ptr, ip, grid, kind)});
        }
        try {
            return ProcessModel(std::move(components));
        } catch (const Error& e) {
            throw ConfigError(cp, e.what());
        }
    }
    return ProcessModel(parseKernel(proc, json::object(), ptr, ptr, grid, kind));
}

KnotSide parseSide(const json& v, const std::string& ptr) {
    std::string s = asString(v, ptr);
    if (s == "right") {
        return KnotSide::right;
    }
    if (s == "left") {
        return KnotSide::left;
    }
    if (s == "none") {
        return KnotSide::none;
    }
    throw ConfigError(ptr, "expected \"left\", \"right\" or \"none\"");
}

void parseExperiment(const json& exp, const std::string& ptr, ExperimentConfig& cfg) {
    if (!exp.is_object()) {
        throw ConfigError(ptr, "expected an object");
    }
    if (const json* derived = optionalField(exp, "derived")) {
        std::string dp = child(ptr, "derived");
        const json& arr = asArray(*derived, dp);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string ip = child(dp, i);
            const json& d = arr[i];
            std::string name = asString(requireField(d, ip, "name"), child(ip, "name"));
            IndexedSet set = parseSet(requireField(d, ip, "set"), child(ip, "set"), cfg.grid);
            std::optional<IndexedSet> minus;
            if (const json* m = optionalField(d, "minus")) {
                minus = parseSet(*m, child(ip, "minus"), cfg.grid);
            }
            cfg.derived.push_back({std::move(name), std::move(set), std::move(minus)});
        }
    }
    if (const json* tuple = optionalField(exp, "tuple")) {
        std::string tp = child(ptr, "tuple");
        const json& arr = asArray(*tuple, tp);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            cfg.tuple.push_back(parseSet(arr[i], child(tp, i), cfg.grid));
        }
    }
    if (const json* g = optionalField(exp, "gencheck")) {
        std::string gp = child(ptr, "gencheck");
        if (!g->is_object()) {
            throw ConfigError(gp, "expected an object");
        }
        if (const json* s = optionalField(*g, "s")) {
            cfg.gencheck.s = asNumber(*s, child(gp, "s"));
        }
        if (const json* t = optionalField(*g, "t")) {
            cfg.gencheck.t = asNumber(*t, child(gp, "t"));
        }
        if (const json* h = optionalField(*g, "h")) {
            cfg.gencheck.h = asString(*h, child(gp, "h"));
            try {
                namedTestFunction(*cfg.gencheck.h);
            } catch (const Error& e) {
                throw ConfigError(child(gp, "h"), e.what());
            }
        }
        if (const json* side = optionalField(*g, "side")) {
            cfg.gencheck.side = parseSide(*side, child(gp, "side"));
        }
        if (const json* eps = optionalField(*g, "eps")) {
            std::string ep = child(gp, "eps");
            const json& arr = asArray(*eps, ep);
            cfg.gencheck.eps.clear();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                double e = asNumber(arr[i], child(ep, i));
                if (e <= 0.0) {
                    throw ConfigError(child(ep, i), "steps must be positive");
                }
                cfg.gencheck.eps.push_back(e);
            }
        }
    }
    if (const json* mc = optionalField(exp, "mc_samples")) {
        cfg.mcSamples = asCount(*mc, child(ptr, "mc_samples"));
        if (cfg.mcSamples < 2) {
            throw ConfigError(child(ptr, "mc_samples"), "need at least 2 samples");
        }
    }
    if (const json* cap = optionalField(exp, "ordering_cap")) {
        cfg.orderingCap = asCount(*cap, child(ptr, "ordering_cap"));
    }
    if (const json* count = optionalField(exp, "count")) {
        cfg.count = asCount(*count, child(ptr, "count"));
    }
}

} // namespace

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ExperimentConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(document.dump())));
    return buf;
}

void applyToleranceOverrides(Tolerances& tol, const json& overrides, const std::string& pointer) {
    if (!overrides.is_object()) {
        throw ConfigError(pointer, "expected an object");
    }
    for (const auto& [key, value] : overrides.items()) {
        std::string kp = child(pointer, key);
        double v = asNumber(value, kp);
        if (!(v > 0.0)) {
            throw ConfigError(kp, "tolerances must be positive");
        }
        if (key == "exact") {
            tol.exact = v;
        } else if (key == "quadrature") {
            tol.quadrature = v;
        } else if (key == "dirichlet") {
            tol.dirichlet = v;
        } else if (key == "mc_se") {
            tol.mcSe = v;
        } else {
            throw ConfigError(kp, "unknown tolerance");
        }
    }
}

ExperimentConfig parseConfig(const json& document) {
    ExperimentConfig cfg;
    cfg.document = document;
    if (!document.is_object()) {
        throw ConfigError("", "expected a JSON object");
    }

    const json& grid = requireField(document, "", "grid");
    auto extents = asCounts(requireField(grid, "/grid", "extents"), "/grid/extents");
    try {
        cfg.grid = GroundGrid::make(extents);
    } catch (const Error& e) {
        throw ConfigError("/grid/extents", e.what());
    }

    const json& lattice = requireField(document, "", "lattice");
    const json& gens = asArray(requireField(lattice, "/lattice", "generators"), "/lattice/generators");
    if (gens.empty()) {
        throw ConfigError("/lattice/generators", "at least one generator is required");
    }
    std::vector<IndexedSet> sets;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        sets.push_back(parseSet(gens[i], child("/lattice/generators", i), cfg.grid));
        if (sets.back().empty()) {
            throw ConfigError(child("/lattice/generators", i), "generators must be nonempty");
        }
    }
    try {
        cfg.lattice = makeLattice(sets);
    } catch (const Error& e) {
        throw ConfigError("/lattice/generators", e.what());
    }

    cfg.process = parseProcess(requireField(document, "", "process"), "/process", cfg.grid);

    if (const json* exp = optionalField(document, "experiment")) {
        parseExperiment(*exp, "/experiment", cfg);
    }
    if (const json* seed = optionalField(document, "seed")) {
        if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0)) {
            throw ConfigError("/seed", "expected an unsigned integer");
        }
        cfg.seed = seed->get<std::uint64_t>();
    }
    if (const json* tol = optionalField(document, "tolerances")) {
        applyToleranceOverrides(cfg.tolerances, *tol, "/tolerances");
    }
    return cfg;
}

ExperimentConfig loadConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parseConfig(doc);
}

} // namespace setmarkov::cli
