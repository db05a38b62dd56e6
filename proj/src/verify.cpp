#include "setmarkov/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "setmarkov/error.hpp"

namespace setmarkov {

namespace {

constexpr double kNegligible = 1e-12;

using Key = std::vector<std::int64_t>;
using Conditional = std::map<Key, std::map<Key, double>>;

double conditionalTv(const std::map<Key, double>& a, double pa, const std::map<Key, double>& b, double pb) {
    std::map<Key, double> diff;
    for (const auto& [k, p] : a) {
        diff[k] += p / pa;
    }
    for (const auto& [k, p] : b) {
        diff[k] -= p / pb;
    }
    double acc = 0.0;
    for (const auto& [k, d] : diff) {
        acc += std::abs(d);
    }
    return 0.5 * acc;
}

KeyFunction sumsOver(std::vector<std::vector<std::size_t>> groups) {
    return [groups = std::move(groups)](const Key& k) {
        Key out;
        out.reserve(groups.size());
        for (const auto& g : groups) {
            std::int64_t s = 0;
            for (std::size_t a : g) {
                s += k[a];
            }
            out.push_back(s);
        }
        return out;
    };
}

std::vector<std::vector<std::size_t>> singletons(std::span<const std::size_t> axes) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t a : axes) {
        out.push_back({a});
    }
    return out;
}

std::string keyString(const Key& k) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < k.size(); ++i) {
        os << (i ? "," : "") << k[i];
    }
    os << ")";
    return os.str();
}

} // namespace

CheckResult conditionalIndependenceDefect(const JointLaw& law, const KeyFunction& target, const KeyFunction& fine,
                                          const KeyFunction& coarse) {
    Conditional byFine;
    Conditional byCoarse;
    std::map<Key, double> fineMass;
    std::map<Key, double> coarseMass;
    std::map<Key, Key> coarseOf;
    for (const auto& [k, p] : law.table) {
        Key t = target(k);
        Key f = fine(k);
        Key c = coarse(k);
        byFine[f][t] += p;
        byCoarse[c][t] += p;
        fineMass[f] += p;
        coarseMass[c] += p;
        coarseOf.emplace(f, c);
    }
    CheckResult out;
    for (const auto& [f, pf] : fineMass) {
        if (pf < kNegligible) {
            ++out.skipped;
            continue;
        }
        const Key& c = coarseOf.at(f);
        double tv = conditionalTv(byFine[f], pf, byCoarse[c], coarseMass[c]);
        if (tv >= out.defect) {
            out.defect = tv;
            out.detail = "worst conditioning value " + keyString(f);
        }
    }
    return out;
}

CheckResult checkAssumption1(const FddSpec& spec, const ConsistentOrdering& ord1, const ConsistentOrdering& ord2,
                             const MonteCarloOptions& mc) {
    if (ord1.lattice() != spec.lattice() || ord2.lattice() != spec.lattice()) {
        throw ConfigurationError("both orderings must order the spec's lattice");
    }
    const std::size_t n = ord1.size();
    std::vector<std::size_t> axes(n);
    for (std::size_t p = 0; p < n; ++p) {
        axes[p] = ord2.positionOf(ord1.memberAt(p));
    }
    CheckResult out;
    if (ord1 == ord2) {
        out.detail = "identical orderings";
        return out;
    }
    if (spec.process().finiteState()) {
        JointLaw a = exactFdd(spec.withOrdering(ord1));
        JointLaw b = exactFdd(spec.withOrdering(ord2)).marginal(axes);
        b.variables = a.variables;
        out.defect = totalVariation(a, b);
        out.detail = "exact total variation";
        return out;
    }

    auto first = sampleFdd(spec.withOrdering(ord1), mc.seed, mc.samples, mc.threads);
    auto second = sampleFdd(spec.withOrdering(ord2), mc.seed, mc.samples, mc.threads);
    return compareOrderingSamples(ord1, first, ord2, second);
}

CheckResult compareOrderingSamples(const ConsistentOrdering& ord1, const std::vector<ProcessSample>& first,
                                   const ConsistentOrdering& ord2, const std::vector<ProcessSample>& second) {
    if (ord1.lattice() != ord2.lattice()) {
        throw ConfigurationError("both orderings must order the same lattice");
    }
    if (first.size() != second.size() || first.size() < 2) {
        throw ConfigurationError("sample sets must have the same size, at least 2");
    }
    const std::size_t n = ord1.size();
    std::vector<std::size_t> axes(n);
    for (std::size_t p = 0; p < n; ++p) {
        axes[p] = ord2.positionOf(ord1.memberAt(p));
    }
    CheckResult out;
    const std::size_t N = first.size();
    std::vector<std::vector<double>> v1(n, std::vector<double>(N));
    std::vector<std::vector<double>> v2(n, std::vector<double>(N));
    for (std::size_t s = 0; s < N; ++s) {
        for (std::size_t p = 0; p < n; ++p) {
            v1[p][s] = first[s].increments()[p];
            v2[p][s] = second[s].increments()[axes[p]];
        }
    }
    std::vector<std::vector<double>> quartiles(n);
    for (std::size_t p = 0; p < n; ++p) {
        std::vector<double> sorted = v1[p];
        std::sort(sorted.begin(), sorted.end());
        for (double q : {0.25, 0.5, 0.75}) {
            quartiles[p].push_back(sorted[static_cast<std::size_t>(q * static_cast<double>(N - 1))]);
        }
    }

    double bestScore = -1.0;
    auto probe = [&](const std::string& name, const std::function<bool(const std::vector<std::vector<double>>&, std::size_t)>& event) {
        double sum = 0.0;
        double sumSq = 0.0;
        for (std::size_t s = 0; s < N; ++s) {
            double d = static_cast<double>(event(v1, s)) - static_cast<double>(event(v2, s));
            sum += d;
            sumSq += d * d;
        }
        double mean = sum / static_cast<double>(N);
        double var = N > 1 ? (sumSq - static_cast<double>(N) * mean * mean) / static_cast<double>(N - 1) : 0.0;
        double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(N));
        if (se == 0.0) {
            ++out.skipped;
            return;
        }
        double score = std::abs(mean) / se;
        if (score > bestScore) {
            bestScore = score;
            out.defect = std::abs(mean);
            out.standardError = se;
            out.detail = "worst probe event " + name;
        }
    };
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < 3; ++q) {
            double thr = quartiles[p][q];
            probe("C" + std::to_string(p) + "<=q" + std::to_string(q + 1),
                  [p, thr](const auto& v, std::size_t s) { return v[p][s] <= thr; });
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t r = p + 1; r < n; ++r) {
            double tp = quartiles[p][1];
            double tr = quartiles[r][1];
            probe("C" + std::to_string(p) + "&C" + std::to_string(r) + "<=median",
                  [p, r, tp, tr](const auto& v, std::size_t s) { return v[p][s] <= tp && v[r][s] <= tr; });
        }
    }
    return out;
}

CheckResult checkSetMarkov(const FddSpec& spec, const IndexedSet& A, const IndexedSet& B,
                           std::span<const IndexedSet> partition) {
    const LeftNeighbourhoods& nb = spec.neighbourhoods();
    IndexedSet covered(B.grid());
    std::vector<std::vector<std::size_t>> cells;
    std::vector<std::size_t> all;
    for (const auto& part : partition) {
        covered = covered | part;
        cells.push_back(nb.decompose(part));
        all.insert(all.end(), cells.back().begin(), cells.back().end());
    }
    if (!(covered == B)) {
        throw ConfigurationError("partition does not cover B = " + B.toString());
    }
    JointLaw law = exactFdd(spec);
    return conditionalIndependenceDefect(law, sumsOver({nb.decompose(A - B)}), sumsOver(cells), sumsOver({all}));
}

CheckResult checkIncrementVectorIndependence(const FddSpec& spec, const IndexedSet& B,
                                             std::span<const IndexedSet> sets) {
    const LeftNeighbourhoods& nb = spec.neighbourhoods();
    std::vector<std::size_t> history = nb.decompose(B);
    std::vector<std::vector<std::size_t>> targets;
    for (const auto& A : sets) {
        targets.push_back(nb.decompose(A - B));
    }
    JointLaw law = exactFdd(spec);
    return conditionalIndependenceDefect(law, sumsOver(targets), sumsOver(singletons(history)), sumsOver({history}));
}

CheckResult checkFlowMarkov(const FddSpec& spec, const DiscreteFlow& flow) {
    CheckResult out;
    if (flow.knots() < 2) {
        out.detail = "single knot";
        return out;
    }
    ChainEmbedding embedding = embedChain(flow.stages(), spec.lattice());
    JointLaw law = exactFdd(spec.withOrdering(embedding.ordering));
    std::vector<std::vector<std::size_t>> chain;
    for (std::size_t idx : embedding.prefixIndices) {
        std::vector<std::size_t> g;
        for (std::size_t p = 0; p <= idx; ++p) {
            g.push_back(p);
        }
        chain.push_back(std::move(g));
    }
    for (std::size_t t = 1; t < chain.size(); ++t) {
        for (std::size_t s = 0; s < t; ++s) {
            std::vector<std::vector<std::size_t>> past(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(s + 1));
            CheckResult r = conditionalIndependenceDefect(law, sumsOver({chain[t]}), sumsOver(past), sumsOver({chain[s]}));
            out.skipped += r.skipped;
            if (r.defect >= out.defect) {
                out.defect = r.defect;
                out.detail = "knots s=" + std::to_string(s) + " t=" + std::to_string(t);
            }
        }
    }
    return out;
}

Distribution composeAlongFlow(const TransitionKernel& kernel, const DiscreteFlow& flow, std::size_t from,
                              std::size_t to, double x) {
    if (from > to || to >= flow.knots()) {
        throw ConfigurationError("composition needs knots from <= to within the flow");
    }
    const auto& stages = flow.stages();
    if (kernel.finiteState()) {
        std::map<std::int64_t, double> law{{kernel.toCount(x), 1.0}};
        for (std::size_t k = from; k < to; ++k) {
            std::map<std::int64_t, double> next;
            for (auto [c, p] : law) {
                for (auto [d, q] : kernel.incrementCounts(stages[k], stages[k + 1], c)) {
                    next[c + d] += p * q;
                }
            }
            law = std::move(next);
        }
        std::vector<double> values;
        std::vector<double> probs;
        double total = 0.0;
        for (auto [c, p] : law) {
            values.push_back(static_cast<double>(c) * kernel.unit());
            probs.push_back(p);
            total += p;
        }
        for (auto& p : probs) {
            p /= total;
        }
        return Distribution::finite(std::move(values), std::move(probs));
    }
    Distribution law = Distribution::pointMass(x);
    for (std::size_t k = from; k < to; ++k) {
        IndexedSet B = stages[k];
        IndexedSet Bp = stages[k + 1];
        if (law.isPointMass()) {
            law = kernel.eval(B, Bp, law.mean());
        } else {
            law = Distribution::compound(std::move(law), [kernel, B, Bp](double y) { return kernel.eval(B, Bp, y); });
        }
    }
    return law;
}

CheckResult checkMatching(const TransitionKernel& kernel, const DiscreteFlow& f, std::size_t s, std::size_t t,
                          const DiscreteFlow& g, std::size_t u, std::size_t v, const std::vector<double>& states) {
    if (s > t || u > v || t >= f.knots() || v >= g.knots()) {
        throw ConfigurationError("matching needs s <= t and u <= v inside both flows");
    }
    if (!(f.stages()[s] == g.stages()[u]) || !(f.stages()[t] == g.stages()[v])) {
        throw ConfigurationError("flows do not share the endpoint sets");
    }
    CheckResult out;
    for (double x : states) {
        Distribution a = composeAlongFlow(kernel, f, s, t, x);
        Distribution b = composeAlongFlow(kernel, g, u, v, x);
        double d = 0.0;
        if (kernel.finiteState()) {
            d = totalVariation(a, b);
        } else {
            for (double z : cdfProbeGrid(kernel.eval(f.stages()[s], f.stages()[t], x))) {
                d = std::max(d, std::abs(a.cdf(z) - b.cdf(z)));
            }
        }
        if (d >= out.defect) {
            out.defect = d;
            out.detail = "worst state x=" + std::to_string(x);
        }
    }
    return out;
}

} // namespace setmarkov
