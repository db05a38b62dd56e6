#include "setmarkov/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "setmarkov/error.hpp"
#include "setmarkov/quadrature.hpp"

namespace setmarkov {

namespace {

constexpr std::size_t kGaussNodes = 32;
constexpr double kNegligible = 1e-12;

bool sameTime(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

/// Barycentric Chebyshev interpolant on [0, 1] through first-kind nodes.
class ChebyshevInterpolant {
public:
    ChebyshevInterpolant(const TestFunction& f, std::size_t n) : nodes_(n), values_(n), weights_(n) {
        for (std::size_t k = 0; k < n; ++k) {
            double theta = std::numbers::pi * (2.0 * static_cast<double>(k) + 1.0) / (2.0 * static_cast<double>(n));
            nodes_[k] = 0.5 * (1.0 - std::cos(theta));
            values_[k] = f(nodes_[k]);
            weights_[k] = (k % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
        }
    }

    double operator()(double x) const {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            double d = x - nodes_[k];
            if (d == 0.0) {
                return values_[k];
            }
            double w = weights_[k] / d;
            num += w * values_[k];
            den += w;
        }
        return num / den;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> weights_;
};

constexpr std::size_t kChebyshevNodes = 33;

} // namespace

TestFunction namedTestFunction(const std::string& name) {
    if (name == "x") {
        return [](double x) { return x; };
    }
    if (name == "x2") {
        return [](double x) { return x * x; };
    }
    if (name == "sin") {
        return [](double x) { return std::sin(x); };
    }
    if (name == "cos") {
        return [](double x) { return std::cos(x); };
    }
    if (name == "inv1p") {
        return [](double x) { return 1.0 / (1.0 + std::abs(x)); };
    }
    if (name == "constant") {
        return [](double) { return 1.0; };
    }
    const std::string prefix = "indicator:";
    if (name.rfind(prefix, 0) == 0) {
        double v = 0.0;
        try {
            v = std::stod(name.substr(prefix.size()));
        } catch (const std::exception&) {
            throw ConfigurationError("bad indicator test function '" + name + "'");
        }
        return [v](double x) { return std::abs(x - v) < 1e-9 ? 1.0 : 0.0; };
    }
    throw ConfigurationError("unknown test function '" + name + "'");
}

GeneratorModel::GeneratorModel(TransitionKernel kernel, std::vector<double> times, std::vector<double> traceValues)
    : kernel_(std::move(kernel)), times_(std::move(times)), values_(std::move(traceValues)) {
    if (times_.empty() || times_.size() != values_.size()) {
        throw ConfigurationError("trace needs one value per knot");
    }
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (!(times_[k] > times_[k - 1])) {
            throw ConfigurationError("trace knots must increase strictly");
        }
        if (values_[k] < values_[k - 1] - 1e-12) {
            throw ConfigurationError("trace must be nondecreasing");
        }
    }
}

GeneratorModel GeneratorModel::fromFlow(const TransitionKernel& kernel, const DiscreteFlow& flow) {
    std::vector<double> values;
    for (const auto& stage : flow.stages()) {
        values.push_back(kernel.measure().measureOf(stage));
    }
    return GeneratorModel(kernel, flow.times(), std::move(values));
}

void GeneratorModel::requireTime(double t) const {
    if (t < times_.front() - 1e-12 || t > times_.back() + 1e-12) {
        throw ConfigurationError("time " + std::to_string(t) + " outside the flow's domain");
    }
}

double GeneratorModel::trace(double t) const {
    requireTime(t);
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) {
        return values_.back();
    }
    if (it == times_.begin()) {
        return values_.front();
    }
    std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    std::size_t lo = hi - 1;
    double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
}

double GeneratorModel::traceDerivative(double t, KnotSide side) const {
    requireTime(t);
    auto slope = [&](std::size_t lo) { return (values_[lo + 1] - values_[lo]) / (times_[lo + 1] - times_[lo]); };
    for (std::size_t k = 0; k < times_.size(); ++k) {
        if (!sameTime(t, times_[k])) {
            continue;
        }
        if (side == KnotSide::none) {
            throw ConfigurationError("time " + std::to_string(t) + " is a trace knot; choose a side");
        }
        if (side == KnotSide::right) {
            if (k + 1 == times_.size()) {
                throw ConfigurationError("no right derivative at the last knot");
            }
            return slope(k);
        }
        if (k == 0) {
            throw ConfigurationError("no left derivative at the first knot");
        }
        return slope(k - 1);
    }
    std::size_t hi = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
    return slope(hi - 1);
}

Distribution GeneratorModel::legTransition(double s, double t, double x) const {
    double gs = trace(s);
    double gt = trace(t);
    return kernel_.evalMasses(gs, std::max(0.0, gt - gs), x);
}

Distribution GeneratorModel::transition(double s, double t, double x) const {
    if (s > t) {
        throw ConfigurationError("semigroup needs s <= t");
    }
    requireTime(s);
    requireTime(t);
    std::vector<double> cuts{s};
    for (double k : times_) {
        if (k > s && k < t && !sameTime(k, s) && !sameTime(k, t)) {
            cuts.push_back(k);
        }
    }
    cuts.push_back(t);
    if (cuts.size() == 2) {
        return legTransition(s, t, x);
    }
    if (kernel_.finiteState()) {
        std::map<std::int64_t, double> law{{kernel_.toCount(x), 1.0}};
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            std::map<std::int64_t, double> next;
            for (auto [c, p] : law) {
                for (auto [y, q] : legTransition(cuts[k], cuts[k + 1], static_cast<double>(c) * kernel_.unit()).atoms()) {
                    next[kernel_.toCount(y)] += p * q;
                }
            }
            law = std::move(next);
        }
        std::vector<double> values;
        std::vector<double> probs;
        double total = 0.0;
        for (auto [c, p] : law) {
            values.push_back(static_cast<double>(c) * kernel_.unit());
            probs.push_back(p);
            total += p;
        }
        for (auto& p : probs) {
            p /= total;
        }
        return Distribution::finite(std::move(values), std::move(probs));
    }
    if (kernel_.kind() == KernelKind::gaussian) {
        // independent normal legs: the variances add
        return kernel_.evalMasses(trace(s), trace(t) - trace(s), x);
    }
    Distribution law = legTransition(cuts[0], cuts[1], x);
    auto self = std::make_shared<const GeneratorModel>(*this);
    for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
        double a = cuts[k];
        double b = cuts[k + 1];
        if (law.isPointMass()) {
            law = legTransition(a, b, law.mean());
        } else {
            law = Distribution::compound(std::move(law), [self, a, b](double y) { return self->legTransition(a, b, y); });
        }
    }
    return law;
}

std::vector<double> defaultStateGrid(const GeneratorModel& model) {
    std::vector<double> grid;
    switch (model.kind()) {
    case KernelKind::empirical:
        for (int k = 0; k <= model.kernel().n(); ++k) {
            grid.push_back(static_cast<double>(k) * model.kernel().unit());
        }
        break;
    case KernelKind::dirichlet:
        for (int k = 0; k <= 20; ++k) {
            grid.push_back(static_cast<double>(k) / 20.0);
        }
        break;
    case KernelKind::poisson:
    case KernelKind::compoundPoisson:
        for (int k = 0; k <= 10; ++k) {
            grid.push_back(static_cast<double>(k));
        }
        break;
    case KernelKind::gaussian:
        for (int k = 0; k <= 40; ++k) {
            grid.push_back(-1.0 + static_cast<double>(k) / 20.0);
        }
        break;
    }
    return grid;
}

SemigroupOperator::SemigroupOperator(GeneratorModel model, std::vector<double> stateGrid)
    : model_(std::move(model)), grid_(std::move(stateGrid)) {
    if (grid_.empty()) {
        throw ConfigurationError("semigroup needs at least one evaluation state");
    }
}

SemigroupOperator::SemigroupOperator(GeneratorModel model) : SemigroupOperator(model, defaultStateGrid(model)) {}

TestFunction SemigroupOperator::apply(double s, double t, TestFunction h) const {
    if (s > t) {
        throw ConfigurationError("semigroup needs s <= t");
    }
    if (s == t) {
        return h;
    }
    auto model = std::make_shared<const GeneratorModel>(model_);
    return [model, s, t, h = std::move(h)](double x) { return model->transition(s, t, x).expectation(h); };
}

std::vector<double> SemigroupOperator::applyOnGrid(double s, double t, const TestFunction& h) const {
    TestFunction Th = apply(s, t, h);
    std::vector<double> out;
    out.reserve(grid_.size());
    for (double x : grid_) {
        out.push_back(Th(x));
    }
    return out;
}

TestFunction closedFormGenerator(const GeneratorModel& model, double s, TestFunction h, KnotSide side) {
    const double G = model.trace(s);
    const double Gp = model.traceDerivative(s, side);
    const TransitionKernel& kernel = model.kernel();
    switch (model.kind()) {
    case KernelKind::empirical: {
        const int n = kernel.n();
        const double unit = kernel.unit();
        double rate = 0.0;
        if (Gp != 0.0) {
            if (kernel.corrupted()) {
                rate = Gp;
            } else if (1.0 - G <= 1e-15) {
                throw ConfigurationError("empirical generator undefined where the trace reaches 1");
            } else {
                rate = Gp / (1.0 - G);
            }
        }
        return [kernel, n, unit, rate, h = std::move(h)](double x) {
            std::int64_t k = kernel.toCount(x);
            if (k >= n || rate == 0.0) {
                return 0.0;
            }
            return static_cast<double>(n - k) * (h(static_cast<double>(k + 1) * unit) - h(static_cast<double>(k) * unit)) *
                   rate;
        };
    }
    case KernelKind::gaussian:
        return [Gp, h = std::move(h)](double x) {
            constexpr double d = kGaussianStencilStep;
            return 0.5 * Gp * (h(x + d) - 2.0 * h(x) + h(x - d)) / (d * d);
        };
    case KernelKind::poisson:
        return [Gp, h = std::move(h)](double x) { return Gp * (h(x + 1.0) - h(x)); };
    case KernelKind::compoundPoisson:
        return [Gp, jumps = kernel.jumps(), h = std::move(h)](double x) {
            double hx = h(x);
            double acc = 0.0;
            for (auto [v, p] : jumps) {
                acc += p * (h(x + static_cast<double>(v)) - hx);
            }
            return Gp * acc;
        };
    case KernelKind::dirichlet: {
        const double b = kernel.measure().total() - G;
        if (Gp != 0.0 && b <= 1e-12) {
            throw ConfigurationError("dirichlet generator needs positive complement mass");
        }
        return [Gp, b, h = std::move(h)](double x) {
            if (x >= 1.0 || Gp == 0.0) {
                return 0.0;
            }
            const double c = 1.0 - x;
            const double hx = h(x);
            constexpr double eta = 1e-6;
            auto integrand = [&](double u) {
                double rest = 1.0 - u;
                if (rest <= 0.0) {
                    return 0.0;
                }
                double quotient = u < 1e-8 ? (h(x + c * eta) - hx) / eta : (h(x + c * u) - hx) / u;
                return quotient * std::pow(rest, b - 1.0);
            };
            return Gp * (integrateSmooth(integrand, 0.0, 0.5, 1e-10) + integrateEndpointSingular(integrand, 0.5, 1.0, {}, 1e-10));
        };
    }
    }
    throw UnsupportedError("unknown kernel kind");
}

std::vector<double> closedFormGeneratorOnGrid(const SemigroupOperator& T, double s, const TestFunction& h,
                                              KnotSide side) {
    TestFunction G = closedFormGenerator(T.model(), s, h, side);
    std::vector<double> out;
    for (double x : T.stateGrid()) {
        out.push_back(G(x));
    }
    return out;
}

std::vector<double> finiteDifferenceGeneratorCheck(const SemigroupOperator& T, double s, std::span<const double> eps,
                                                   const TestFunction& h, KnotSide side) {
    std::vector<double> gen = closedFormGeneratorOnGrid(T, s, h, side);
    std::vector<double> errors;
    for (double e : eps) {
        if (!(e > 0.0)) {
            throw ConfigurationError("finite-difference steps must be positive");
        }
        std::vector<double> Th = T.applyOnGrid(s, s + e, h);
        double worst = 0.0;
        for (std::size_t i = 0; i < Th.size(); ++i) {
            double x = T.stateGrid()[i];
            worst = std::max(worst, std::abs((Th[i] - h(x)) / e - gen[i]));
        }
        errors.push_back(worst);
    }
    return errors;
}

TestFunction generatorIntegral(const GeneratorModel& model, double s, double t, TestFunction h) {
    if (s > t) {
        throw ConfigurationError("integral needs s <= t");
    }
    auto self = std::make_shared<const GeneratorModel>(model);
    // Dirichlet: y -> T_{wt} h(y) interpolated once per node w, through T_{kt} h interpolated
    // once per interior knot k.
    struct Cache {
        std::mutex mutex;
        std::map<double, TestFunction> byKnot;
        std::map<double, std::shared_ptr<const ChebyshevInterpolant>> byTime;
    };
    auto cache = std::make_shared<Cache>();
    if (self->kind() == KernelKind::dirichlet) {
        std::vector<double> inner;
        for (double k : self->times()) {
            if (k > s && k < t) {
                inner.push_back(k);
            }
        }
        TestFunction g = h;
        double next = t;
        for (auto it = inner.rbegin(); it != inner.rend(); ++it) {
            double k = *it;
            TestFunction exact = [&](double y) { return self->transition(k, next, y).expectation(g); };
            auto interpolant = std::make_shared<const ChebyshevInterpolant>(exact, kChebyshevNodes);
            g = [interpolant, h](double y) { return y >= 1.0 ? h(y) : (*interpolant)(y); };
            cache->byKnot.emplace(k, g);
            next = k;
        }
    }
    auto propagated = [self, t, h, cache](double w) -> TestFunction {
        if (self->kind() != KernelKind::dirichlet) {
            return [self, w, t, h](double y) { return self->transition(w, t, y).expectation(h); };
        }
        std::lock_guard lock(cache->mutex);
        auto it = cache->byTime.find(w);
        if (it == cache->byTime.end()) {
            auto knot = cache->byKnot.upper_bound(w);
            double target = knot == cache->byKnot.end() ? t : knot->first;
            const TestFunction& g = knot == cache->byKnot.end() ? h : knot->second;
            TestFunction exact = [&](double y) { return self->transition(w, target, y).expectation(g); };
            it = cache->byTime.emplace(w, std::make_shared<const ChebyshevInterpolant>(exact, kChebyshevNodes)).first;
        }
        auto interpolant = it->second;
        return [interpolant, h](double y) { return y >= 1.0 ? h(y) : (*interpolant)(y); };
    };
    return [self, s, t, propagated](double x) {
        if (s == t) {
            return 0.0;
        }
        std::vector<double> cuts{s};
        for (double k : self->times()) {
            if (k > s && k < t) {
                cuts.push_back(k);
            }
        }
        cuts.push_back(t);
        double total = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            total += integrateGauss(
                [&](double w) { return closedFormGenerator(*self, w, propagated(w))(x); },
                cuts[k], cuts[k + 1], kGaussNodes);
        }
        return total;
    };
}

double integralIdentityResidual(const SemigroupOperator& T, double s, double t, const TestFunction& h) {
    if (s == t) {
        return 0.0;
    }
    TestFunction Th = T.apply(s, t, h);
    TestFunction I = generatorIntegral(T.model(), s, t, h);
    double worst = 0.0;
    for (double x : T.stateGrid()) {
        worst = std::max(worst, std::abs(Th(x) - h(x) - I(x)));
    }
    return worst;
}

double assumption4Check(const TransitionKernel& kernel, const DiscreteFlow& f, std::size_t s, std::size_t t,
                        const DiscreteFlow& g, std::size_t u, std::size_t v, std::span<const TestFunction> basis) {
    if (s > t || u > v || t >= f.knots() || v >= g.knots()) {
        throw ConfigurationError("assumption 4 needs s <= t and u <= v inside both flows");
    }
    if (!(f.stages()[s] == g.stages()[u]) || !(f.stages()[t] == g.stages()[v])) {
        throw ConfigurationError("flows do not share the endpoint sets");
    }
    GeneratorModel mf = GeneratorModel::fromFlow(kernel, f);
    GeneratorModel mg = GeneratorModel::fromFlow(kernel, g);
    std::vector<double> states = defaultStateGrid(mf);
    double worst = 0.0;
    for (const auto& h : basis) {
        TestFunction If = generatorIntegral(mf, f.times()[s], f.times()[t], h);
        TestFunction Ig = generatorIntegral(mg, g.times()[u], g.times()[v], h);
        for (double x : states) {
            worst = std::max(worst, std::abs(If(x) - Ig(x)));
        }
    }
    return worst;
}

std::vector<TestFunction> defaultTestBasis(const GeneratorModel& model) {
    std::vector<TestFunction> basis;
    for (double v : defaultStateGrid(model)) {
        basis.push_back([v](double x) { return std::abs(x - v) < 1e-9 ? 1.0 : 0.0; });
    }
    basis.push_back([](double x) { return x; });
    return basis;
}

namespace {

using Key = std::vector<std::int64_t>;

struct FuturePath {
    std::int64_t state;
    std::map<std::size_t, std::int64_t> increments;
    double prob;
};

} // namespace

PermutationIdentityResult permutationIdentityCheck(const FddSpec& spec, const ConsistentOrdering& ord1,
                                                   const ConsistentOrdering& ord2, int level,
                                                   std::span<const TestFunction> functions) {
    if (spec.process().isMixture() || !spec.process().finiteState()) {
        throw UnsupportedError("permutation identities need a single finite-state kernel");
    }
    if (ord1.lattice() != spec.lattice() || ord2.lattice() != spec.lattice()) {
        throw ConfigurationError("both orderings must order the spec's lattice");
    }
    if (level < 2 || level > 3) {
        throw ConfigurationError("permutation identities are implemented for levels 2 and 3");
    }
    const std::size_t lvl = static_cast<std::size_t>(level);
    if (lvl > ord1.size()) {
        throw ConfigurationError("lattice has fewer than " + std::to_string(level) + " members");
    }
    if (functions.empty()) {
        throw ConfigurationError("permutation identities need at least one test function");
    }
    const TransitionKernel& kernel = spec.process().kernel();
    const double unit = kernel.unit();

    // q[j]: position in ord2 of the member added by leg j of ord1 (legs 2..level).
    std::vector<std::size_t> q(lvl + 1, 0);
    for (std::size_t j = 2; j <= lvl; ++j) {
        q[j] = ord2.positionOf(ord1.memberAt(j - 1));
    }
    const std::size_t L = q[lvl];
    std::size_t lastFuture = L;
    for (std::size_t j = 2; j < lvl; ++j) {
        lastFuture = std::max(lastFuture, q[j]);
    }

    JointLaw law2 = exactFdd(spec.withOrdering(ord2));
    GeneratorModel modelF = GeneratorModel::fromFlow(kernel, flowFromOrdering(ord1, kernel.measure()));
    GeneratorModel modelG = GeneratorModel::fromFlow(kernel, flowFromOrdering(ord2, kernel.measure()));
    const IndexedSet fFrom = ord1.prefixUnion(lvl - 2);
    const IndexedSet fTo = ord1.prefixUnion(lvl - 1);
    std::vector<IndexedSet> gPrefix;
    for (std::size_t p = 0; p < ord2.size(); ++p) {
        gPrefix.push_back(ord2.prefixUnion(p));
    }

    std::vector<std::vector<TestFunction>> tuples;
    for (const auto& a : functions) {
        if (lvl == 2) {
            tuples.push_back({a});
        } else {
            for (const auto& b : functions) {
                tuples.push_back({a, b});
            }
        }
    }

    PermutationIdentityResult out;
    for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
        const auto& hs = tuples[ti];
        // hs[j - 2] is h_j
        const TestFunction& hi = hs.back();
        auto product = [&](const std::map<std::size_t, std::int64_t>& D) {
            double acc = 1.0;
            for (std::size_t j = 2; j < lvl; ++j) {
                acc *= hs[j - 2](static_cast<double>(D.at(j)) * unit);
            }
            return acc;
        };

        std::map<std::int64_t, double> legF;
        auto Tf = [&](std::int64_t y) {
            auto it = legF.find(y);
            if (it != legF.end()) {
                return it->second;
            }
            double acc = 0.0;
            for (auto [d, p] : kernel.incrementCounts(fFrom, fTo, y)) {
                acc += p * hi(static_cast<double>(y + d) * unit);
            }
            return legF[y] = acc;
        };
        TestFunction JfFn = generatorIntegral(modelF, static_cast<double>(lvl - 2), static_cast<double>(lvl - 1), hi);
        std::map<std::int64_t, double> Jmemo;
        auto Jf = [&](std::int64_t y) {
            auto it = Jmemo.find(y);
            if (it != Jmemo.end()) {
                return it->second;
            }
            return Jmemo[y] = JfFn(static_cast<double>(y) * unit);
        };

        std::map<std::int64_t, double> mass;
        std::map<std::int64_t, double> lhs;
        std::map<std::int64_t, double> rhs;
        std::map<std::int64_t, double> lhsGen;
        std::map<std::int64_t, std::map<Key, double>> histories;
        for (const auto& [key, p] : law2.table) {
            std::int64_t x0 = key[0];
            std::map<std::size_t, std::int64_t> D;
            std::int64_t before = x0;
            for (std::size_t j = 2; j < lvl; ++j) {
                D[j] = key[q[j]];
                before += D[j];
            }
            double prod = product(D);
            mass[x0] += p;
            lhs[x0] += p * prod * Tf(before);
            rhs[x0] += p * prod * hi(static_cast<double>(before + key[L]) * unit);
            lhsGen[x0] += p * prod * Jf(before);
            histories[x0][Key(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(L))] += p;
        }

        for (const auto& [x0, px] : mass) {
            if (px < kNegligible) {
                ++out.skipped;
                continue;
            }
            double rhsGen = 0.0;
            for (const auto& [H, pH] : histories[x0]) {
                std::int64_t yPrev = 0;
                for (auto v : H) {
                    yPrev += v;
                }
                std::map<std::size_t, std::int64_t> known;
                for (std::size_t j = 2; j < lvl; ++j) {
                    if (q[j] < L) {
                        known[j] = H[q[j]];
                    }
                }
                auto memo = std::make_shared<std::map<std::int64_t, double>>();
                TestFunction psi = [&, memo, known, yPrev, x0](double z) {
                    std::int64_t zc = kernel.toCount(z);
                    auto it = memo->find(zc);
                    if (it != memo->end()) {
                        return it->second;
                    }
                    std::vector<FuturePath> paths{{zc, {}, 1.0}};
                    for (std::size_t r = L + 1; r <= lastFuture; ++r) {
                        std::vector<FuturePath> next;
                        for (const auto& path : paths) {
                            for (auto [d, w] : kernel.incrementCounts(gPrefix[r - 1], gPrefix[r], path.state)) {
                                FuturePath np = path;
                                np.state += d;
                                np.increments[r] = d;
                                np.prob *= w;
                                next.push_back(std::move(np));
                            }
                        }
                        paths = std::move(next);
                    }
                    double acc = 0.0;
                    for (const auto& path : paths) {
                        std::map<std::size_t, std::int64_t> D = known;
                        std::int64_t sum = x0;
                        for (std::size_t j = 2; j < lvl; ++j) {
                            if (q[j] > L) {
                                D[j] = path.increments.at(q[j]);
                            }
                            sum += D[j];
                        }
                        acc += path.prob * product(D) *
                               (hi(static_cast<double>(sum + zc - yPrev) * unit) - hi(static_cast<double>(sum) * unit));
                    }
                    return (*memo)[zc] = acc;
                };
                const double uTo = static_cast<double>(L);
                double integral = integrateGauss(
                    [&](double v) {
                        TestFunction Tv = [&](double y) { return modelG.transition(v, uTo, y).expectation(psi); };
                        return closedFormGenerator(modelG, v, Tv)(static_cast<double>(yPrev) * unit);
                    },
                    uTo - 1.0, uTo, kGaussNodes);
                rhsGen += pH * integral;
            }
            double exact = std::abs(lhs[x0] - rhs[x0]) / px;
            double gen = std::abs(lhsGen[x0] - rhsGen) / px;
            if (exact >= out.exactDefect) {
                out.exactDefect = exact;
            }
            if (gen >= out.generatorDefect) {
                out.generatorDefect = gen;
            }
            if (std::max(exact, gen) >= out.defect()) {
                out.detail = "worst x1=" + std::to_string(static_cast<double>(x0) * unit) + " test tuple " +
                             std::to_string(ti);
            }
        }
    }
    return out;
}

} // namespace setmarkov
