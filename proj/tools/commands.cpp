#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "setmarkov/error.hpp"
#include "setmarkov/verify.hpp"

namespace setmarkov::cli {

namespace {

using nlohmann::json;

// Below this every finite-difference error counts as exact agreement.
constexpr double kExactLinear = 1e-12;
constexpr double kRatioLow = 1.5;
constexpr double kRatioHigh = 3.0;

std::string orderingString(const ConsistentOrdering& ord) {
    std::ostringstream os;
    os << "[";
    for (std::size_t p = 0; p < ord.size(); ++p) {
        os << (p ? "," : "") << ord.memberAt(p);
    }
    os << "]";
    return os.str();
}

class Suite {
public:
    void add(const std::string& name, const std::string& instance, double defect, double tolerance, bool pass,
             double standardError = -1.0) {
        if (!std::isfinite(defect)) {
            pass = false;
        }
        json rec{{"name", name}, {"instance", instance}, {"defect", defect}, {"tolerance", tolerance}, {"pass", pass}};
        if (standardError >= 0.0) {
            rec["standard_error"] = standardError;
        }
        checks_.push_back(std::move(rec));
        pass_ = pass_ && pass;
    }

    /// defect < tolerance
    void addBelow(const std::string& name, const std::string& instance, double defect, double tolerance) {
        add(name, instance, defect, tolerance, defect < tolerance);
    }

    void skip(const std::string& name, const std::string& instance, const std::string& reason) {
        skipped_.push_back({{"name", name}, {"instance", instance}, {"reason", reason}});
    }

    json checks() const { return checks_; }
    json skipped() const { return skipped_; }
    bool pass() const { return pass_; }

private:
    json checks_ = json::array();
    json skipped_ = json::array();
    bool pass_ = true;
};

std::vector<double> kernelStates(const TransitionKernel& k) {
    switch (k.kind()) {
    case KernelKind::empirical: {
        std::vector<double> out;
        for (int j = 0; j <= k.n(); ++j) {
            out.push_back(static_cast<double>(j) * k.unit());
        }
        return out;
    }
    case KernelKind::poisson:
    case KernelKind::compoundPoisson:
        return {0.0, 1.0, 2.0, 3.0, 4.0};
    case KernelKind::gaussian:
        return {-1.0, 0.0, 1.0};
    case KernelKind::dirichlet:
        return {0.0, 0.25, 0.5};
    }
    return {0.0};
}

std::string defaultTestFunction(const TransitionKernel& k) {
    switch (k.kind()) {
    case KernelKind::empirical:
        return "indicator:" + formatReal(k.unit());
    case KernelKind::poisson:
    case KernelKind::compoundPoisson:
        return "inv1p";
    case KernelKind::gaussian:
        return "sin";
    case KernelKind::dirichlet:
        return "x2";
    }
    return "x";
}

std::vector<IndexedSet> prefixUnions(const ConsistentOrdering& ord) {
    std::vector<IndexedSet> out;
    for (std::size_t p = 0; p < ord.size(); ++p) {
        out.push_back(ord.prefixUnion(p));
    }
    return out;
}

DiscreteFlow chainFlow(const ConsistentOrdering& ord) {
    std::vector<double> times;
    for (std::size_t p = 0; p < ord.size(); ++p) {
        times.push_back(static_cast<double>(p));
    }
    return DiscreteFlow(std::move(times), prefixUnions(ord));
}

double ratioDistance(double r) {
    if (!std::isfinite(r)) {
        return std::numeric_limits<double>::infinity();
    }
    if (r < kRatioLow) {
        return kRatioLow - r;
    }
    if (r > kRatioHigh) {
        return r - kRatioHigh;
    }
    return 0.0;
}

struct OrderTest {
    std::vector<double> errors;
    std::vector<double> ratios;
    bool exact = false;
    double defect = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

OrderTest orderTest(std::vector<double> errors) {
    OrderTest out;
    out.errors = std::move(errors);
    double worst = 0.0;
    for (double e : out.errors) {
        worst = std::max(worst, e);
    }
    if (worst < kExactLinear) {
        out.exact = true;
        out.defect = worst;
        out.tolerance = kExactLinear;
        out.pass = true;
        return out;
    }
    for (std::size_t i = 0; i + 1 < out.errors.size(); ++i) {
        double r = out.errors[i] / out.errors[i + 1];
        out.ratios.push_back(r);
        out.defect = std::max(out.defect, ratioDistance(r));
    }
    out.pass = out.defect <= out.tolerance;
    return out;
}

std::string listString(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + formatReal(v[i]);
    }
    return s + "]";
}

struct Context {
    const ExperimentConfig& cfg;
    const std::vector<ConsistentOrdering>& orderings;
    Suite& suite;
    std::uint64_t seed;
    unsigned threads;

    const ConsistentOrdering& canonical() const { return orderings.front(); }
    const Tolerances& tol() const { return cfg.tolerances; }
};

void kernelChecks(Context& ctx, const TransitionKernel& k, const std::string& label) {
    const bool finite = k.finiteState();
    const std::vector<double> states = kernelStates(k);
    const double ckTol = finite ? ctx.tol().exact : ctx.tol().quadrature;

    double identity = 0.0;
    for (const auto& B : ctx.cfg.lattice->members()) {
        for (double x : states) {
            Distribution d = k.eval(B, B, x);
            identity = std::max(identity, d.isPointMass() ? std::abs(d.mean() - x) : 1.0);
        }
    }
    ctx.suite.addBelow("identity_law", label + "all members", identity, ctx.tol().exact);

    std::set<std::string> seen;
    for (const auto& ord : ctx.orderings) {
        if (!finite && !(ord == ctx.canonical())) {
            break;
        }
        auto P = prefixUnions(ord);
        for (std::size_t i = 0; i < P.size(); ++i) {
            for (std::size_t j = i + 1; j < P.size(); ++j) {
                for (std::size_t l = j + 1; l < P.size(); ++l) {
                    std::string inst = label + "B=" + P[i].toString() + " B'=" + P[j].toString() +
                                       " B''=" + P[l].toString();
                    if (!seen.insert(inst).second) {
                        continue;
                    }
                    ctx.suite.addBelow("chapman_kolmogorov", inst,
                                       chapmanKolmogorovDefect(k, P[i], P[j], P[l], states), ckTol);
                }
            }
        }
    }
    if (seen.empty()) {
        ctx.suite.skip("chapman_kolmogorov", label + "lattice", "fewer than three prefix unions");
    }
}

void generatorChecks(Context& ctx, const TransitionKernel& k, const std::string& label) {
    if (ctx.cfg.lattice->size() < 2) {
        ctx.suite.skip("generator", label + "canonical flow", "single-member lattice has no flow legs");
        return;
    }
    const auto& opts = ctx.cfg.gencheck;
    const std::string hName = opts.h.value_or(defaultTestFunction(k));
    const TestFunction h = namedTestFunction(hName);
    SemigroupOperator T(GeneratorModel::fromFlow(k, flowFromOrdering(ctx.canonical(), k.measure())));
    const double legs = static_cast<double>(ctx.cfg.lattice->size() - 1);
    const bool dirichlet = k.kind() == KernelKind::dirichlet;
    const double quadTol = dirichlet ? ctx.tol().dirichlet : ctx.tol().quadrature;

    try {
        OrderTest fd = orderTest(finiteDifferenceGeneratorCheck(T, opts.s, opts.eps, h, opts.side));
        std::string inst = label + "h=" + hName + " s=" + formatReal(opts.s) + " errors=" + listString(fd.errors);
        if (!fd.exact) {
            inst += " ratios=" + listString(fd.ratios);
        }
        ctx.suite.add(fd.exact ? "generator_exact" : "generator_order", inst, fd.defect, fd.tolerance, fd.pass);
    } catch (const ConfigurationError& e) {
        ctx.suite.skip("generator_order", label + "h=" + hName, e.what());
    }

    for (double s = 0.0; s < legs; s += 1.0) {
        try {
            double r = integralIdentityResidual(T, s, s + 1.0, h);
            ctx.suite.addBelow("integral_identity", label + "h=" + hName + " [" + formatReal(s) + "," +
                                                        formatReal(s + 1.0) + "]",
                               r, quadTol);
        } catch (const ConfigurationError& e) {
            ctx.suite.skip("integral_identity", label + "leg " + formatReal(s), e.what());
        }
    }

    const double t = 1.0;
    const double u = 0.5;
    TestFunction inner = T.apply(u, t, h);
    std::vector<double> composed = T.applyOnGrid(0.0, u, inner);
    std::vector<double> direct = T.applyOnGrid(0.0, t, h);
    double gap = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
        gap = std::max(gap, std::abs(composed[i] - direct[i]));
    }
    const double semigroupTol = k.finiteState() ? ctx.tol().exact : quadTol;
    ctx.suite.addBelow("semigroup", label + "h=" + hName + " s=0 u=" + formatReal(u) + " t=" + formatReal(t), gap,
                       semigroupTol);
}

void permutationChecks(Context& ctx, const FddSpec& spec) {
    const TransitionKernel& k = spec.process().kernel();
    GeneratorModel model = GeneratorModel::fromFlow(k, flowFromOrdering(ctx.canonical(), k.measure()));
    std::vector<TestFunction> basis = defaultTestBasis(model);
    bool any = false;
    for (const auto& ord : ctx.orderings) {
        if (ord == ctx.canonical()) {
            continue;
        }
        for (int level : {2, 3}) {
            if (static_cast<std::size_t>(level) > ord.size()) {
                continue;
            }
            std::string inst = orderingString(ctx.canonical()) + " vs " + orderingString(ord);
            std::string name = "permutation_level" + std::to_string(level);
            try {
                PermutationIdentityResult r = permutationIdentityCheck(spec, ctx.canonical(), ord, level, basis);
                ctx.suite.addBelow(name, inst, r.exactDefect, ctx.tol().exact);
                ctx.suite.addBelow(name + "_generator", inst, r.generatorDefect, ctx.tol().quadrature);
                any = true;
            } catch (const CapacityError& e) {
                ctx.suite.skip(name, inst, e.what());
            }
        }
    }
    if (!any) {
        ctx.suite.skip("permutation", "lattice", "needs two consistent orderings");
    }
}

void flowPairChecks(Context& ctx, const TransitionKernel& k, const std::string& label) {
    const std::size_t n = ctx.cfg.lattice->size();
    if (n < 3) {
        ctx.suite.skip("matching", label + "lattice", "no refinement with an intermediate knot");
        return;
    }
    const IndexedSet bottom = ctx.cfg.lattice->minSet();
    const IndexedSet top = ctx.cfg.lattice->unionOfMembers();
    DiscreteFlow direct({0.0, 1.0}, {bottom, top});
    const std::vector<double> states = kernelStates(k);
    if (k.finiteState()) {
        for (const auto& ord : ctx.orderings) {
            DiscreteFlow chain = chainFlow(ord);
            CheckResult r = checkMatching(k, direct, 0, 1, chain, 0, n - 1, states);
            ctx.suite.addBelow("matching", label + "direct vs " + orderingString(ord), r.defect, ctx.tol().exact);
        }
        DiscreteFlow chain = chainFlow(ctx.canonical());
        GeneratorModel model = GeneratorModel::fromFlow(k, chain);
        double d = assumption4Check(k, direct, 0, 1, chain, 0, n - 1, defaultTestBasis(model));
        ctx.suite.addBelow("assumption4", label + "direct vs " + orderingString(ctx.canonical()), d,
                           ctx.tol().quadrature);
        return;
    }
    // Continuous kinds: a single intermediate knot.
    const IndexedSet mid = ctx.canonical().prefixUnion((n - 1) / 2);
    DiscreteFlow refined({0.0, 1.0, 2.0}, {bottom, mid, top});
    CheckResult r = checkMatching(k, direct, 0, 1, refined, 0, 2, states);
    ctx.suite.addBelow("matching", label + "direct vs via " + mid.toString(), r.defect, ctx.tol().quadrature);
    ctx.suite.skip("assumption4", label + "lattice", "needs a finite-state kernel");
}

void processChecks(Context& ctx, const FddSpec& spec) {
    const bool finite = spec.process().finiteState();
    if (ctx.orderings.size() < 2) {
        ctx.suite.skip("assumption1", "lattice", "single consistent ordering");
    }
    for (const auto& ord : ctx.orderings) {
        if (ord == ctx.canonical()) {
            continue;
        }
        std::string inst = orderingString(ctx.canonical()) + " vs " + orderingString(ord);
        try {
            if (finite) {
                CheckResult r = checkAssumption1(spec, ctx.canonical(), ord);
                ctx.suite.addBelow("assumption1", inst, r.defect, ctx.tol().exact);
            } else {
                MonteCarloOptions mc{ctx.cfg.mcSamples, ctx.seed, ctx.threads};
                CheckResult r = checkAssumption1(spec, ctx.canonical(), ord, mc);
                double bound = ctx.tol().mcSe * r.standardError;
                ctx.suite.add("assumption1", inst + " " + r.detail, r.defect, bound,
                              r.defect == 0.0 || r.defect < bound, r.standardError);
            }
        } catch (const CapacityError& e) {
            ctx.suite.skip("assumption1", inst, e.what());
        }
    }

    if (!finite) {
        for (const char* name : {"set_markov", "increment_vector", "flow_markov"}) {
            ctx.suite.skip(name, "process", "needs exact joint laws of a finite-state process");
        }
        return;
    }
    try {
        const auto& lat = *ctx.cfg.lattice;
        const LeftNeighbourhoods& nb = spec.neighbourhoods();
        for (std::size_t i = 0; i + 1 < lat.size(); ++i) {
            IndexedSet B = ctx.canonical().prefixUnion(i);
            std::vector<IndexedSet> partition(nb.sets().begin(), nb.sets().begin() + static_cast<std::ptrdiff_t>(i + 1));
            std::vector<IndexedSet> outside;
            for (const auto& A : lat.members()) {
                if (A.subsetOf(B)) {
                    continue;
                }
                outside.push_back(A);
                CheckResult r = checkSetMarkov(spec, A, B, partition);
                ctx.suite.addBelow("set_markov", "A=" + A.toString() + " B=" + B.toString(), r.defect,
                                   ctx.tol().exact);
            }
            if (!outside.empty()) {
                CheckResult r = checkIncrementVectorIndependence(spec, B, outside);
                ctx.suite.addBelow("increment_vector", "B=" + B.toString() + " sets=" + std::to_string(outside.size()),
                                   r.defect, ctx.tol().exact);
            }
        }
        for (const auto& ord : ctx.orderings) {
            CheckResult r = checkFlowMarkov(spec, chainFlow(ord));
            ctx.suite.addBelow("flow_markov", orderingString(ord), r.defect, ctx.tol().exact);
        }
    } catch (const CapacityError& e) {
        ctx.suite.skip("set_markov", "process", e.what());
    }
}

std::vector<ConsistentOrdering> orderingsOf(const ExperimentConfig& cfg) {
    try {
        return enumerateConsistentOrderings(cfg.lattice, cfg.orderingCap);
    } catch (const CapacityError& e) {
        throw ConfigError("/experiment/ordering_cap", e.what());
    }
}

json baseReport(const ExperimentConfig& cfg) {
    return json{{"tool", kToolName}, {"version", kToolVersion}, {"config_hash", cfg.hash()}};
}

} // namespace

std::string formatReal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json validateReport(const ExperimentConfig& cfg, std::uint64_t seed, unsigned threads) {
    const ProcessModel& model = cfg.model();
    std::vector<ConsistentOrdering> orderings = orderingsOf(cfg);
    Suite suite;
    Context ctx{cfg, orderings, suite, seed, threads};
    FddSpec spec(ctx.canonical(), model);

    json initial = json::array();
    for (std::size_t c = 0; c < model.components().size(); ++c) {
        initial.push_back(spec.initialLaw(c).describe());
    }

    for (std::size_t c = 0; c < model.components().size(); ++c) {
        const TransitionKernel& k = model.components()[c].kernel;
        std::string label = model.isMixture() ? "component " + std::to_string(c) + ": " : "";
        kernelChecks(ctx, k, label);
        generatorChecks(ctx, k, label);
        flowPairChecks(ctx, k, label);
    }
    if (!model.isMixture() && model.finiteState()) {
        permutationChecks(ctx, spec);
    } else {
        suite.skip("permutation", "process", "needs a single finite-state kernel");
    }
    processChecks(ctx, spec);

    json report = baseReport(cfg);
    report["command"] = "validate";
    report["seed"] = seed;
    report["process"] = model.kernel().describe();
    report["initial_law"] = initial;
    report["orderings"] = orderings.size();
    report["checks"] = suite.checks();
    report["skipped"] = suite.skipped();
    report["pass"] = suite.pass();
    return report;
}

void writeSampleCsv(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t count, unsigned threads,
                    std::ostream& out) {
    if (count < 1) {
        throw ConfigError("/experiment/count", "count must be at least 1");
    }
    FddSpec spec(ConsistentOrdering::canonical(cfg.lattice), cfg.model());
    const std::size_t n = cfg.lattice->size();
    const std::vector<ProcessSample> samples = sampleFdd(spec, seed, count, threads);

    std::vector<std::function<double(const ProcessSample&)>> derived;
    for (std::size_t i = 0; i < cfg.derived.size(); ++i) {
        const DerivedSet& d = cfg.derived[i];
        std::function<double(const ProcessSample&)> f;
        if (d.minus) {
            f = [&d](const ProcessSample& s) { return evaluateOnAlgebra(s, d.set, *d.minus); };
        } else {
            f = [&d](const ProcessSample& s) { return evaluateOnAlgebra(s, d.set); };
        }
        try {
            f(samples.front());
        } catch (const DecompositionError& e) {
            throw ConfigError("/experiment/derived/" + std::to_string(i), e.what());
        }
        derived.push_back(std::move(f));
    }

    out << "sample";
    for (std::size_t p = 0; p < n; ++p) {
        out << ",C" << p;
    }
    for (const auto& d : cfg.derived) {
        out << "," << d.name;
    }
    out << "\n";
    for (std::size_t s = 0; s < samples.size(); ++s) {
        out << s;
        for (double v : samples[s].increments()) {
            out << "," << formatReal(v);
        }
        for (const auto& f : derived) {
            out << "," << formatReal(f(samples[s]));
        }
        out << "\n";
    }
}

void writeFddCsv(const ExperimentConfig& cfg, std::ostream& out) {
    if (!cfg.model().finiteState()) {
        throw UnsupportedError("fdd needs a finite-state process; use the sample subcommand for " +
                               toString(cfg.model().kernel().kind()));
    }
    FddSpec spec(ConsistentOrdering::canonical(cfg.lattice), cfg.model());
    JointLaw law;
    if (cfg.tuple.empty()) {
        law = exactFdd(spec);
    } else {
        try {
            law = jointOverIncrements(spec, cfg.tuple);
        } catch (const DecompositionError& e) {
            throw ConfigError("/experiment/tuple", e.what());
        }
    }
    for (std::size_t i = 0; i < law.variables.size(); ++i) {
        out << (i ? "," : "") << law.variables[i];
    }
    out << ",probability\n";
    for (const auto& [key, p] : law.table) {
        for (std::size_t i = 0; i < key.size(); ++i) {
            out << (i ? "," : "") << formatReal(static_cast<double>(key[i]) * law.unit);
        }
        out << "," << formatReal(p) << "\n";
    }
}

json gencheckReport(const ExperimentConfig& cfg, const std::vector<double>& eps) {
    if (cfg.model().isMixture()) {
        throw ConfigError("/process/components", "gencheck needs a single kernel");
    }
    if (cfg.lattice->size() < 2) {
        throw ConfigError("/lattice/generators", "gencheck needs a lattice with at least two members");
    }
    const TransitionKernel& k = cfg.model().kernel();
    const auto& opts = cfg.gencheck;
    const std::string hName = opts.h.value_or(defaultTestFunction(k));
    const TestFunction h = namedTestFunction(hName);
    SemigroupOperator T(GeneratorModel::fromFlow(k, flowFromOrdering(ConsistentOrdering::canonical(cfg.lattice),
                                                                     k.measure())));
    const double end = T.model().times().back();
    const double t = opts.t.value_or(std::min(opts.s + 0.5, end));
    if (opts.s < 0.0 || t > end || opts.s > t) {
        throw ConfigError("/experiment/gencheck", "need 0 <= s <= t <= " + formatReal(end));
    }

    OrderTest fd = orderTest(finiteDifferenceGeneratorCheck(T, opts.s, eps, h, opts.side));
    double residual = integralIdentityResidual(T, opts.s, t, h);
    double tol = k.kind() == KernelKind::dirichlet ? cfg.tolerances.dirichlet : cfg.tolerances.quadrature;

    json report = baseReport(cfg);
    report["command"] = "gencheck";
    report["check"] = "generator";
    report["kind"] = toString(k.kind());
    report["h"] = hName;
    report["s"] = opts.s;
    report["t"] = t;
    report["side"] = opts.side == KnotSide::left ? "left" : opts.side == KnotSide::right ? "right" : "none";
    report["eps"] = eps;
    report["residuals"] = fd.errors;
    report["ratios"] = fd.ratios;
    if (fd.exact) {
        report["order_estimate"] = nullptr;
    } else {
        double acc = 0.0;
        for (double r : fd.ratios) {
            acc += std::log2(r);
        }
        report["order_estimate"] = fd.ratios.empty() ? 0.0 : acc / static_cast<double>(fd.ratios.size());
    }
    report["exact"] = fd.exact;
    report["integral_residual"] = residual;
    report["tolerance"] = tol;
    report["pass"] = fd.pass && residual < tol;
    return report;
}

} // namespace setmarkov::cli
