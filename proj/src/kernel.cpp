#include "setmarkov/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>

#include "setmarkov/error.hpp"

namespace setmarkov {

std::string toString(KernelKind kind) {
    switch (kind) {
    case KernelKind::gaussian:
        return "gaussian";
    case KernelKind::poisson:
        return "poisson";
    case KernelKind::compoundPoisson:
        return "compound_poisson";
    case KernelKind::empirical:
        return "empirical";
    case KernelKind::dirichlet:
        return "dirichlet";
    }
    return "unknown";
}

KernelKind kernelKindFromString(const std::string& name) {
    for (auto kind : {KernelKind::gaussian, KernelKind::poisson, KernelKind::compoundPoisson, KernelKind::empirical,
                      KernelKind::dirichlet}) {
        if (toString(kind) == name) {
            return kind;
        }
    }
    throw ConfigurationError("unknown process kind '" + name + "'");
}

CountPmf compoundPoissonCounts(double lambda, const CountPmf& jumps) {
    std::map<std::int64_t, double> out;
    std::map<std::int64_t, double> power{{0, 1.0}};
    long done = 0;
    for (auto [k, w] : poissonAtoms(lambda)) {
        while (done < k) {
            std::map<std::int64_t, double> next;
            for (auto [v, p] : power) {
                for (auto [j, q] : jumps) {
                    next[v + j] += p * q;
                }
            }
            power = std::move(next);
            ++done;
        }
        for (auto [v, p] : power) {
            out[v] += w * p;
        }
    }
    return CountPmf(out.begin(), out.end());
}

TransitionKernel TransitionKernel::gaussian(CellMeasure lambda, InitialChoice initial) {
    if (lambda.kind() != MeasureKind::intensity) {
        throw ConfigurationError("gaussian kernel needs an intensity measure");
    }
    TransitionKernel k(KernelKind::gaussian, std::move(lambda));
    k.initialChoice_ = initial;
    return k;
}

TransitionKernel TransitionKernel::poisson(CellMeasure lambda, InitialChoice initial) {
    if (lambda.kind() != MeasureKind::intensity) {
        throw ConfigurationError("poisson kernel needs an intensity measure");
    }
    TransitionKernel k(KernelKind::poisson, std::move(lambda));
    k.initialChoice_ = initial;
    return k;
}

TransitionKernel TransitionKernel::compoundPoisson(CellMeasure lambda, CountPmf jumps, InitialChoice initial) {
    if (lambda.kind() != MeasureKind::intensity) {
        throw ConfigurationError("compound poisson kernel needs an intensity measure");
    }
    if (jumps.empty()) {
        throw ConfigurationError("compound poisson kernel needs at least one jump size");
    }
    double total = 0.0;
    for (auto [v, p] : jumps) {
        if (v == 0 || p < 0.0) {
            throw ConfigurationError("jump sizes must be nonzero with nonnegative probabilities");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ConfigurationError("jump probabilities must sum to 1");
    }
    std::sort(jumps.begin(), jumps.end());
    TransitionKernel k(KernelKind::compoundPoisson, std::move(lambda));
    k.jumps_ = std::move(jumps);
    k.initialChoice_ = initial;
    return k;
}

TransitionKernel TransitionKernel::empirical(int n, CellMeasure F, bool corrupted) {
    if (n < 1) {
        throw ConfigurationError("empirical kernel needs n >= 1");
    }
    if (F.kind() != MeasureKind::probability) {
        throw ConfigurationError("empirical kernel needs a probability measure");
    }
    TransitionKernel k(KernelKind::empirical, std::move(F));
    k.n_ = n;
    k.corrupted_ = corrupted;
    return k;
}

TransitionKernel TransitionKernel::dirichlet(CellMeasure alpha) {
    if (alpha.kind() != MeasureKind::dirichlet) {
        throw ConfigurationError("dirichlet kernel needs a dirichlet parameter measure");
    }
    return TransitionKernel(KernelKind::dirichlet, std::move(alpha));
}

bool TransitionKernel::finiteState() const {
    return kind_ == KernelKind::empirical || kind_ == KernelKind::poisson || kind_ == KernelKind::compoundPoisson;
}

double TransitionKernel::unit() const {
    switch (kind_) {
    case KernelKind::empirical:
        return 1.0 / n_;
    case KernelKind::poisson:
    case KernelKind::compoundPoisson:
        return 1.0;
    default:
        return 0.0;
    }
}

std::int64_t TransitionKernel::toCount(double x) const {
    if (!finiteState()) {
        throw UnsupportedError(toString(kind_) + " kernel has no lattice of states");
    }
    double scaled = x / unit();
    double r = std::round(scaled);
    if (std::abs(scaled - r) > 1e-9 * std::max(1.0, std::abs(r))) {
        throw ConfigurationError("state " + std::to_string(x) + " is not on the kernel's lattice");
    }
    return static_cast<std::int64_t>(r);
}

void TransitionKernel::requireInclusion(const IndexedSet& B, const IndexedSet& Bp) const {
    if (!B.sameGrid(Bp) || !B.grid() || !(*B.grid() == *grid())) {
        throw ConfigurationError("kernel sets must live on the kernel's grid");
    }
    if (!B.subsetOf(Bp)) {
        throw ConfigurationError("kernel needs B ⊆ B'; got " + B.toString() + " and " + Bp.toString());
    }
}

Distribution TransitionKernel::evalMasses(double fromMass, double stepMass, double x) const {
    if (stepMass <= 0.0) {
        return Distribution::pointMass(x);
    }
    switch (kind_) {
    case KernelKind::gaussian:
        return Distribution::normal(x, stepMass);
    case KernelKind::poisson:
        return Distribution::poisson(stepMass).affine(x, 1.0);
    case KernelKind::compoundPoisson: {
        std::vector<double> values;
        std::vector<double> probs;
        double total = 0.0;
        for (auto [v, p] : compoundPoissonCounts(stepMass, jumps_)) {
            values.push_back(x + static_cast<double>(v));
            probs.push_back(p);
            total += p;
        }
        for (auto& p : probs) {
            p /= total;
        }
        return Distribution::finite(std::move(values), std::move(probs));
    }
    case KernelKind::empirical: {
        std::int64_t k = toCount(x);
        if (k < 0 || k > n_) {
            throw ConfigurationError("empirical state outside [0, 1]");
        }
        double p = corrupted_ ? stepMass : (1.0 - fromMass <= 1e-15 ? 0.0 : stepMass / (1.0 - fromMass));
        return Distribution::binomial(n_ - k, std::clamp(p, 0.0, 1.0)).affine(x, unit());
    }
    case KernelKind::dirichlet: {
        if (x < -1e-12 || x > 1.0 + 1e-12) {
            throw ConfigurationError("dirichlet state outside [0, 1]");
        }
        if (x >= 1.0) {
            return Distribution::pointMass(1.0);
        }
        double rest = measure_.total() - fromMass - stepMass;
        if (rest < 1e-12 * measure_.total()) {
            rest = 0.0;
        }
        return Distribution::beta(stepMass, rest).affine(x, 1.0 - x);
    }
    }
    throw UnsupportedError("unknown kernel kind");
}

Distribution TransitionKernel::eval(const IndexedSet& B, const IndexedSet& Bp, double x) const {
    requireInclusion(B, Bp);
    if (B == Bp) {
        return Distribution::pointMass(x);
    }
    return evalMasses(measure_.measureOf(B), measure_.measureOf(Bp - B), x);
}

Distribution TransitionKernel::initialLaw(const IndexedSet& bottom) const {
    double m = measure_.measureOf(bottom);
    switch (kind_) {
    case KernelKind::gaussian:
        return initialChoice_ == InitialChoice::zero ? Distribution::pointMass(0.0) : Distribution::normal(0.0, m);
    case KernelKind::poisson:
    case KernelKind::compoundPoisson:
        if (initialChoice_ == InitialChoice::zero) {
            return Distribution::pointMass(0.0);
        }
        return evalMasses(0.0, m, 0.0);
    case KernelKind::empirical:
        return Distribution::binomial(n_, m).affine(0.0, unit());
    case KernelKind::dirichlet:
        return evalMasses(0.0, m, 0.0);
    }
    throw UnsupportedError("unknown kernel kind");
}

CountPmf TransitionKernel::stepCounts(double fromMass, double stepMass, std::int64_t count) const {
    if (stepMass <= 0.0) {
        return {{0, 1.0}};
    }
    switch (kind_) {
    case KernelKind::poisson: {
        CountPmf out;
        for (auto [k, w] : poissonAtoms(stepMass)) {
            out.emplace_back(k, w);
        }
        return out;
    }
    case KernelKind::compoundPoisson:
        return compoundPoissonCounts(stepMass, jumps_);
    case KernelKind::empirical: {
        double p = corrupted_ ? stepMass : (1.0 - fromMass <= 1e-15 ? 0.0 : stepMass / (1.0 - fromMass));
        p = std::clamp(p, 0.0, 1.0);
        std::int64_t trials = n_ - count;
        if (trials < 0) {
            throw ConfigurationError("empirical count exceeds n");
        }
        if (trials == 0 || p == 0.0) {
            return {{0, 1.0}};
        }
        if (p == 1.0) {
            return {{trials, 1.0}};
        }
        boost::math::binomial_distribution<double> law(static_cast<double>(trials), p);
        CountPmf out;
        for (std::int64_t j = 0; j <= trials; ++j) {
            double w = boost::math::pdf(law, static_cast<double>(j));
            if (w > 0.0) {
                out.emplace_back(j, w);
            }
        }
        return out;
    }
    default:
        throw UnsupportedError(toString(kind_) + " kernel is not finite-state; use sampling");
    }
}

CountPmf TransitionKernel::incrementCounts(const IndexedSet& B, const IndexedSet& Bp, std::int64_t count) const {
    requireInclusion(B, Bp);
    if (B == Bp) {
        return {{0, 1.0}};
    }
    return stepCounts(measure_.measureOf(B), measure_.measureOf(Bp - B), count);
}

CountPmf TransitionKernel::initialCounts(const IndexedSet& bottom) const {
    double m = measure_.measureOf(bottom);
    if (kind_ != KernelKind::empirical && initialChoice_ == InitialChoice::zero) {
        return {{0, 1.0}};
    }
    return stepCounts(0.0, m, 0);
}

std::string TransitionKernel::describe() const {
    std::ostringstream os;
    os << toString(kind_);
    if (kind_ == KernelKind::empirical) {
        os << "(n=" << n_ << (corrupted_ ? ", corrupted" : "") << ")";
    }
    return os.str();
}

Distribution kernelEval(const TransitionKernel& k, const IndexedSet& B, const IndexedSet& Bp, double x) {
    return k.eval(B, Bp, x);
}

Distribution composeKernels(const TransitionKernel& k, const IndexedSet& B, const IndexedSet& Bp,
                            const IndexedSet& Bpp, double x) {
    if (!B.subsetOf(Bp) || !Bp.subsetOf(Bpp)) {
        throw ConfigurationError("composition needs B ⊆ B' ⊆ B''");
    }
    Distribution first = k.eval(B, Bp, x);
    if (k.finiteState()) {
        std::map<std::int64_t, double> acc;
        for (auto [y, p] : first.atoms()) {
            for (auto [z, q] : k.eval(Bp, Bpp, y).atoms()) {
                acc[k.toCount(z)] += p * q;
            }
        }
        std::vector<double> values;
        std::vector<double> probs;
        double total = 0.0;
        for (auto [c, p] : acc) {
            values.push_back(static_cast<double>(c) * k.unit());
            probs.push_back(p);
            total += p;
        }
        for (auto& p : probs) {
            p /= total;
        }
        return Distribution::finite(std::move(values), std::move(probs));
    }
    if (first.isPointMass()) {
        return k.eval(Bp, Bpp, first.mean());
    }
    return Distribution::compound(std::move(first), [k, Bp, Bpp](double y) { return k.eval(Bp, Bpp, y); });
}

double totalVariation(const Distribution& a, const Distribution& b) {
    std::map<long long, double> diff;
    for (auto [v, p] : a.atoms()) {
        diff[std::llround(v * 1e9)] += p;
    }
    for (auto [v, p] : b.atoms()) {
        diff[std::llround(v * 1e9)] -= p;
    }
    double acc = 0.0;
    for (auto [v, d] : diff) {
        acc += std::abs(d);
    }
    return 0.5 * acc;
}

std::vector<double> cdfProbeGrid(const Distribution& law) {
    double lo = 0.0;
    double hi = 1.0;
    const auto& repr = law.repr();
    if (const auto* n = std::get_if<Distribution::Normal>(&repr)) {
        double sd = std::sqrt(n->variance);
        lo = n->mean - 6.0 * sd;
        hi = n->mean + 6.0 * sd;
    } else if (std::holds_alternative<Distribution::Beta>(repr)) {
        lo = 0.0;
        hi = 1.0;
    } else if (law.isDiscrete()) {
        auto atoms = law.atoms();
        lo = atoms.front().first - 0.5;
        hi = atoms.back().first + 0.5;
        lo = (lo - law.offset()) / law.scale();
        hi = (hi - law.offset()) / law.scale();
    } else {
        double m = law.mean();
        lo = (m - 1.0 - law.offset()) / law.scale();
        hi = (m + 1.0 - law.offset()) / law.scale();
    }
    std::vector<double> probes(101);
    for (std::size_t i = 0; i < probes.size(); ++i) {
        double y = lo + (hi - lo) * static_cast<double>(i) / 100.0;
        probes[i] = law.offset() + law.scale() * y;
    }
    return probes;
}

double chapmanKolmogorovDefect(const TransitionKernel& k, const IndexedSet& B, const IndexedSet& Bp,
                               const IndexedSet& Bpp, const std::vector<double>& states) {
    double worst = 0.0;
    for (double x : states) {
        Distribution composed = composeKernels(k, B, Bp, Bpp, x);
        Distribution direct = k.eval(B, Bpp, x);
        if (k.finiteState()) {
            worst = std::max(worst, totalVariation(composed, direct));
            continue;
        }
        for (double z : cdfProbeGrid(direct)) {
            worst = std::max(worst, std::abs(composed.cdf(z) - direct.cdf(z)));
        }
    }
    return worst;
}

MonteCarloDefect chapmanKolmogorovMonteCarlo(const TransitionKernel& k, const IndexedSet& B, const IndexedSet& Bp,
                                             const IndexedSet& Bpp, double x, std::size_t samples,
                                             std::uint64_t seed) {
    if (samples == 0) {
        throw ConfigurationError("Monte Carlo check needs at least one sample");
    }
    Distribution composed = composeKernels(k, B, Bp, Bpp, x);
    Distribution direct = k.eval(B, Bpp, x);
    std::vector<double> draws(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        StreamRng rng(seed, s, 0);
        draws[s] = composed.sample(rng);
    }
    std::sort(draws.begin(), draws.end());
    MonteCarloDefect out;
    const double N = static_cast<double>(samples);
    for (double z : cdfProbeGrid(direct)) {
        double F = direct.cdf(z);
        double ecdf = static_cast<double>(std::upper_bound(draws.begin(), draws.end(), z) - draws.begin()) / N;
        out.defect = std::max(out.defect, std::abs(ecdf - F));
        out.standardError = std::max(out.standardError, std::sqrt(F * (1.0 - F) / N));
    }
    return out;
}

ProcessModel::ProcessModel(TransitionKernel kernel) : components_{{1.0, std::move(kernel)}} {}

ProcessModel::ProcessModel(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) {
        throw ConfigurationError("a process needs at least one component");
    }
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0)) {
            throw ConfigurationError("mixture weights must be positive");
        }
        if (c.kernel.kind() != kernel().kind() || c.kernel.unit() != kernel().unit() ||
            !(*c.kernel.grid() == *kernel().grid())) {
            throw ConfigurationError("mixture components must share kind, state lattice and grid");
        }
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ConfigurationError("mixture weights must sum to 1");
    }
}

bool ProcessModel::finiteState() const { return kernel().finiteState(); }

double ProcessModel::unit() const { return kernel().unit(); }

} // namespace setmarkov
