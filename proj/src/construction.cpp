#include "setmarkov/construction.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "setmarkov/error.hpp"

namespace setmarkov {

FddSpec::FddSpec(ConsistentOrdering ordering, ProcessModel process, std::optional<Distribution> initial)
    : ordering_(std::move(ordering)), process_(std::move(process)), initial_(std::move(initial)) {
    if (!(*lattice()->grid() == *process_.grid())) {
        throw ConfigurationError("process grid does not match the lattice grid");
    }
    neighbourhoods_ = std::make_shared<const LeftNeighbourhoods>(ordering_);
}

Distribution FddSpec::initialLaw(std::size_t component) const {
    if (initial_) {
        return *initial_;
    }
    return process_.components().at(component).kernel.initialLaw(lattice()->minSet());
}

FddSpec FddSpec::withOrdering(ConsistentOrdering ordering) const {
    if (ordering.lattice() != lattice()) {
        throw ConfigurationError("ordering belongs to a different lattice");
    }
    return FddSpec(std::move(ordering), process_, initial_);
}

double JointLaw::totalProbability() const {
    double acc = 0.0;
    for (const auto& [k, p] : table) {
        acc += p;
    }
    return acc;
}

JointLaw JointLaw::marginal(std::span<const std::size_t> axes) const {
    JointLaw out;
    out.unit = unit;
    for (std::size_t a : axes) {
        out.variables.push_back(variables.at(a));
    }
    std::vector<std::int64_t> key(axes.size());
    for (const auto& [k, p] : table) {
        for (std::size_t i = 0; i < axes.size(); ++i) {
            key[i] = k[axes[i]];
        }
        out.table[key] += p;
    }
    return out;
}

JointLaw JointLaw::pushforward(std::vector<std::string> labels, const std::vector<std::vector<std::size_t>>& groups) const {
    if (labels.size() != groups.size()) {
        throw ConfigurationError("pushforward needs one label per group");
    }
    JointLaw out;
    out.unit = unit;
    out.variables = std::move(labels);
    std::vector<std::int64_t> key(groups.size());
    for (const auto& [k, p] : table) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::int64_t s = 0;
            for (std::size_t a : groups[g]) {
                s += k.at(a);
            }
            key[g] = s;
        }
        out.table[key] += p;
    }
    return out;
}

double totalVariation(const JointLaw& a, const JointLaw& b) {
    if (a.variables.size() != b.variables.size() || a.unit != b.unit) {
        throw ConfigurationError("joint laws have different shapes");
    }
    double acc = 0.0;
    auto ia = a.table.begin();
    auto ib = b.table.begin();
    while (ia != a.table.end() || ib != b.table.end()) {
        if (ib == b.table.end() || (ia != a.table.end() && ia->first < ib->first)) {
            acc += std::abs(ia->second);
            ++ia;
        } else if (ia == a.table.end() || ib->first < ia->first) {
            acc += std::abs(ib->second);
            ++ib;
        } else {
            acc += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return 0.5 * acc;
}

namespace {

std::vector<std::string> neighbourhoodLabels(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("C" + std::to_string(i));
    }
    return labels;
}

CountPmf initialCountsFor(const FddSpec& spec, const TransitionKernel& kernel) {
    if (!spec.initialOverride()) {
        return kernel.initialCounts(spec.lattice()->minSet());
    }
    std::map<std::int64_t, double> acc;
    for (auto [v, p] : spec.initialOverride()->atoms()) {
        acc[kernel.toCount(v)] += p;
    }
    return CountPmf(acc.begin(), acc.end());
}

} // namespace

JointLaw exactFdd(const FddSpec& spec) {
    const ProcessModel& process = spec.process();
    if (!process.finiteState()) {
        throw UnsupportedError("exact tables need a finite-state process; " + process.kernel().describe() +
                               " must be sampled");
    }
    const ConsistentOrdering& ord = spec.ordering();
    std::vector<IndexedSet> prefixes;
    for (std::size_t pos = 0; pos < ord.size(); ++pos) {
        prefixes.push_back(ord.prefixUnion(pos));
    }

    JointLaw out;
    out.variables = neighbourhoodLabels(ord.size());
    out.unit = process.unit();
    for (const auto& component : process.components()) {
        const TransitionKernel& kernel = component.kernel;
        std::map<std::vector<std::int64_t>, double> table;
        for (auto [c, p] : initialCountsFor(spec, kernel)) {
            table[{c}] += component.weight * p;
        }
        for (std::size_t pos = 1; pos < ord.size(); ++pos) {
            std::map<std::int64_t, CountPmf> steps;
            std::map<std::vector<std::int64_t>, double> next;
            for (const auto& [key, p] : table) {
                std::int64_t x = 0;
                for (auto v : key) {
                    x += v;
                }
                auto it = steps.find(x);
                if (it == steps.end()) {
                    it = steps.emplace(x, kernel.incrementCounts(prefixes[pos - 1], prefixes[pos], x)).first;
                }
                std::vector<std::int64_t> extended = key;
                extended.push_back(0);
                for (auto [d, q] : it->second) {
                    extended.back() = d;
                    next[extended] += p * q;
                }
                if (next.size() > kMaxTableEntries) {
                    throw CapacityError("exact joint table exceeds " + std::to_string(kMaxTableEntries) + " entries");
                }
            }
            table = std::move(next);
        }
        for (const auto& [key, p] : table) {
            out.table[key] += p;
        }
        if (out.table.size() > kMaxTableEntries) {
            throw CapacityError("exact joint table exceeds " + std::to_string(kMaxTableEntries) + " entries");
        }
    }
    return out;
}

double ProcessSample::value(const IndexedSet& target) const {
    double acc = 0.0;
    for (std::size_t pos : neighbourhoods_->decompose(target)) {
        acc += increments_[pos];
    }
    return acc;
}

std::vector<ProcessSample> sampleFdd(const FddSpec& spec, std::uint64_t seed, std::size_t count, unsigned threads) {
    if (count == 0) {
        throw ConfigurationError("sample count must be at least 1");
    }
    const ConsistentOrdering& ord = spec.ordering();
    const ProcessModel& process = spec.process();
    const std::size_t n = ord.size();

    struct Step {
        std::size_t member;
        double fromMass;
        double stepMass;
    };
    std::vector<std::vector<Step>> plans;
    std::vector<Distribution> initials;
    for (std::size_t c = 0; c < process.components().size(); ++c) {
        const TransitionKernel& kernel = process.components()[c].kernel;
        std::vector<Step> plan;
        for (std::size_t pos = 1; pos < n; ++pos) {
            IndexedSet before = ord.prefixUnion(pos - 1);
            IndexedSet after = ord.prefixUnion(pos);
            plan.push_back({ord.memberAt(pos), kernel.measure().measureOf(before),
                            kernel.measure().measureOf(after - before)});
        }
        plans.push_back(std::move(plan));
        initials.push_back(spec.initialLaw(c));
    }

    std::vector<std::vector<double>> increments(count, std::vector<double>(n, 0.0));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            StreamRng first(seed, s, 0);
            std::size_t c = 0;
            if (process.isMixture()) {
                double u = first.uniform();
                double acc = 0.0;
                for (c = 0; c + 1 < process.components().size(); ++c) {
                    acc += process.components()[c].weight;
                    if (u <= acc) {
                        break;
                    }
                }
            }
            const TransitionKernel& kernel = process.components()[c].kernel;
            double x = initials[c].sample(first);
            if (kernel.finiteState()) {
                x = static_cast<double>(kernel.toCount(x)) * kernel.unit();
            }
            auto& row = increments[s];
            row[0] = x;
            for (std::size_t pos = 1; pos < n; ++pos) {
                const Step& step = plans[c][pos - 1];
                StreamRng rng(seed, s, step.member);
                double y = kernel.evalMasses(step.fromMass, step.stepMass, x).sample(rng);
                if (kernel.finiteState()) {
                    std::int64_t dy = kernel.toCount(y) - kernel.toCount(x);
                    row[pos] = static_cast<double>(dy) * kernel.unit();
                    x = static_cast<double>(kernel.toCount(y)) * kernel.unit();
                } else {
                    row[pos] = y - x;
                    x = y;
                }
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads == 1) {
        work(0, count);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (count + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t begin = std::min(count, t * chunk);
            std::size_t end = std::min(count, begin + chunk);
            pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::vector<ProcessSample> out;
    out.reserve(count);
    for (auto& row : increments) {
        out.emplace_back(std::move(row), spec.neighbourhoodsPtr());
    }
    return out;
}

double evaluateOnAlgebra(const ProcessSample& sample, const IndexedSet& target) { return sample.value(target); }

double evaluateOnAlgebra(const ProcessSample& sample, const IndexedSet& A, const IndexedSet& B) {
    return sample.value(A - B);
}

JointLaw jointOverIncrements(const FddSpec& spec, std::span<const IndexedSet> tuple) {
    JointLaw full = exactFdd(spec);
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::string> labels;
    for (const auto& target : tuple) {
        groups.push_back(spec.neighbourhoods().decompose(target));
        labels.push_back(target.toString());
    }
    return full.pushforward(std::move(labels), groups);
}

IndexedSet CRepresentation::set() const {
    if (terms.empty()) {
        throw ConfigurationError("a representation needs at least one term");
    }
    IndexedSet out(terms.front().positive.grid());
    for (const auto& term : terms) {
        IndexedSet piece = term.positive;
        for (const auto& neg : term.negatives) {
            piece = piece - neg;
        }
        out = out | piece;
    }
    return out;
}

JointLaw jointOverIncrements(const FddSpec& spec, std::span<const CRepresentation> tuple) {
    std::vector<IndexedSet> generators{spec.lattice()->minSet()};
    for (const auto& rep : tuple) {
        for (const auto& term : rep.terms) {
            generators.push_back(term.positive);
            for (const auto& neg : term.negatives) {
                generators.push_back(neg);
            }
        }
    }
    LatticePtr minimal = makeLattice(generators);
    if (!(minimal->minSet() == spec.lattice()->minSet())) {
        throw DecompositionError("representation sets must contain ∅′ = " + spec.lattice()->minSet().toString());
    }
    FddSpec local(ConsistentOrdering::canonical(minimal), spec.process(), spec.initialOverride());
    std::vector<IndexedSet> targets;
    for (const auto& rep : tuple) {
        targets.push_back(rep.set());
    }
    return jointOverIncrements(local, targets);
}

} // namespace setmarkov
