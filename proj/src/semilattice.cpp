#include "setmarkov/semilattice.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "setmarkov/error.hpp"

namespace setmarkov {

namespace {

void requireOneGrid(std::span<const IndexedSet> sets) {
    for (const auto& s : sets) {
        if (!s.sameGrid(sets.front())) {
            throw ConfigurationError("all sets must live on one grid");
        }
    }
}

} // namespace

Semilattice::Semilattice(std::vector<IndexedSet> members) : members_(std::move(members)) {
    if (members_.empty()) {
        throw ConfigurationError("a semilattice needs at least one member");
    }
    requireOneGrid(members_);
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());

    IndexedSet bottom = members_.front();
    for (const auto& m : members_) {
        if (m.empty()) {
            throw ConfigurationError("semilattice members must be nonempty");
        }
        bottom = bottom & m;
    }
    if (bottom.empty()) {
        throw ConfigurationError("empty ∅′: the members have empty intersection");
    }
    if (!(bottom == members_.front())) {
        throw ConfigurationError("family is not closed under intersection: missing " + bottom.toString());
    }
    for (std::size_t i = 0; i < members_.size(); ++i) {
        for (std::size_t j = i + 1; j < members_.size(); ++j) {
            auto cap = members_[i] & members_[j];
            if (!indexOf(cap)) {
                throw ConfigurationError("family is not closed under intersection: " +
                                         members_[i].toString() + " ∩ " + members_[j].toString() +
                                         " = " + cap.toString() + " is missing");
            }
        }
    }
    const std::size_t n = members_.size();
    below_.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            below_[i][j] = i != j && members_[i].subsetOf(members_[j]);
        }
    }
}

Semilattice Semilattice::closeUnderIntersection(std::span<const IndexedSet> generators) {
    if (generators.empty()) {
        throw ConfigurationError("closeUnderIntersection needs at least one generator");
    }
    requireOneGrid(generators);
    IndexedSet all = generators.front();
    for (const auto& g : generators) {
        if (g.empty()) {
            throw ConfigurationError("generators must be nonempty");
        }
        all = all & g;
    }
    if (all.empty()) {
        throw ConfigurationError("empty ∅′: the generators have empty intersection");
    }

    std::set<IndexedSet> closed(generators.begin(), generators.end());
    std::vector<IndexedSet> frontier(closed.begin(), closed.end());
    while (!frontier.empty()) {
        std::vector<IndexedSet> fresh;
        std::vector<IndexedSet> snapshot(closed.begin(), closed.end());
        for (const auto& f : frontier) {
            for (const auto& s : snapshot) {
                auto cap = f & s;
                if (closed.insert(cap).second) {
                    fresh.push_back(cap);
                }
            }
        }
        frontier = std::move(fresh);
    }
    return Semilattice(std::vector<IndexedSet>(closed.begin(), closed.end()));
}

std::optional<std::size_t> Semilattice::indexOf(const IndexedSet& s) const {
    auto it = std::lower_bound(members_.begin(), members_.end(), s);
    if (it != members_.end() && *it == s) {
        return static_cast<std::size_t>(it - members_.begin());
    }
    return std::nullopt;
}

IndexedSet Semilattice::unionOfMembers() const { return unionOf(members_, grid()); }

LatticePtr makeLattice(std::span<const IndexedSet> generators) {
    return std::make_shared<const Semilattice>(Semilattice::closeUnderIntersection(generators));
}

ConsistentOrdering::ConsistentOrdering(LatticePtr lattice, std::vector<std::size_t> order)
    : lattice_(std::move(lattice)), order_(std::move(order)) {
    const std::size_t n = lattice_->size();
    if (order_.size() != n) {
        throw ConfigurationError("ordering length does not match the lattice");
    }
    position_.assign(n, n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (order_[pos] >= n || position_[order_[pos]] != n) {
            throw ConfigurationError("ordering is not a permutation of the lattice members");
        }
        position_[order_[pos]] = pos;
    }
    if (order_.front() != 0) {
        throw ConfigurationError("a consistent ordering must start with ∅′");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (lattice_->properSubset(i, j) && position_[i] > position_[j]) {
                throw ConfigurationError("ordering places " + lattice_->member(j).toString() +
                                         " before its subset " + lattice_->member(i).toString());
            }
        }
    }
}

ConsistentOrdering ConsistentOrdering::canonical(LatticePtr lattice) {
    std::vector<std::size_t> order(lattice->size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    return ConsistentOrdering(std::move(lattice), std::move(order));
}

IndexedSet ConsistentOrdering::prefixUnion(std::size_t position) const {
    IndexedSet out = at(0);
    for (std::size_t p = 1; p <= position; ++p) {
        out = out | at(p);
    }
    return out;
}

std::vector<ConsistentOrdering> enumerateConsistentOrderings(const LatticePtr& lattice, std::size_t cap) {
    const std::size_t n = lattice->size();
    std::vector<std::size_t> pendingSubsets(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (lattice->properSubset(i, j)) {
                ++pendingSubsets[j];
            }
        }
    }
    std::vector<std::vector<std::size_t>> found;
    std::vector<std::size_t> current;
    std::vector<bool> placed(n, false);

    std::function<void()> extend = [&]() {
        if (current.size() == n) {
            if (found.size() == cap) {
                throw CapacityError("more than " + std::to_string(cap) + " consistent orderings");
            }
            found.push_back(current);
            return;
        }
        for (std::size_t m = 0; m < n; ++m) {
            if (placed[m] || pendingSubsets[m] != 0) {
                continue;
            }
            placed[m] = true;
            current.push_back(m);
            for (std::size_t j = 0; j < n; ++j) {
                if (lattice->properSubset(m, j)) {
                    --pendingSubsets[j];
                }
            }
            extend();
            for (std::size_t j = 0; j < n; ++j) {
                if (lattice->properSubset(m, j)) {
                    ++pendingSubsets[j];
                }
            }
            current.pop_back();
            placed[m] = false;
        }
    };
    extend();

    std::vector<ConsistentOrdering> out;
    out.reserve(found.size());
    for (auto& order : found) {
        out.emplace_back(lattice, std::move(order));
    }
    return out;
}

LeftNeighbourhoods::LeftNeighbourhoods(const ConsistentOrdering& ordering) {
    IndexedSet covered = ordering.at(0);
    sets_.push_back(covered);
    members_.push_back(ordering.memberAt(0));
    for (std::size_t pos = 1; pos < ordering.size(); ++pos) {
        sets_.push_back(ordering.at(pos) - covered);
        members_.push_back(ordering.memberAt(pos));
        covered = covered | ordering.at(pos);
    }
}

std::size_t LeftNeighbourhoods::positionOfMember(std::size_t member) const {
    auto it = std::find(members_.begin(), members_.end(), member);
    if (it == members_.end()) {
        throw ConfigurationError("member " + std::to_string(member) + " has no left neighbourhood here");
    }
    return static_cast<std::size_t>(it - members_.begin());
}

std::vector<std::size_t> LeftNeighbourhoods::decompose(const IndexedSet& target) const {
    std::vector<std::size_t> positions;
    IndexedSet covered(target.grid());
    IndexedSet straddling(target.grid());
    for (std::size_t pos = 0; pos < sets_.size(); ++pos) {
        const auto& c = sets_[pos];
        if (c.empty()) {
            continue;
        }
        if (c.subsetOf(target)) {
            positions.push_back(pos);
            covered = covered | c;
        } else if (c.intersects(target)) {
            straddling = straddling | (c & target);
        }
    }
    IndexedSet uncovered = target - covered;
    if (!uncovered.empty()) {
        std::ostringstream os;
        os << "set " << target.toString() << " is not a union of left neighbourhoods; offending cells "
           << uncovered.toString();
        if (!straddling.empty()) {
            os << " (partially covered neighbourhood cells " << straddling.toString() << ")";
        }
        throw DecompositionError(os.str());
    }
    return positions;
}

LeftNeighbourhoods leftNeighbourhoods(const ConsistentOrdering& ordering) { return LeftNeighbourhoods(ordering); }

IndexedSet leftNeighbourhoodOf(const Semilattice& lattice, std::size_t member) {
    const IndexedSet& a = lattice.member(member);
    if (member == 0) {
        return a;
    }
    IndexedSet removed(a.grid());
    for (const auto& other : lattice.members()) {
        if (!a.subsetOf(other)) {
            removed = removed | other;
        }
    }
    return a - removed;
}

std::vector<IndexedSet> extremalRepresentation(std::span<const IndexedSet> parts) {
    std::vector<IndexedSet> kept(parts.begin(), parts.end());
    if (kept.empty()) {
        return kept;
    }
    requireOneGrid(parts);
    std::size_t i = 0;
    while (i < kept.size()) {
        IndexedSet others(kept[i].grid());
        for (std::size_t j = 0; j < kept.size(); ++j) {
            if (j != i) {
                others = others | kept[j];
            }
        }
        if (kept[i].subsetOf(others)) {
            kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    return kept;
}

ChainEmbedding embedChain(std::span<const IndexedSet> chain, const LatticePtr& lattice) {
    if (chain.empty()) {
        throw ConfigurationError("embedChain needs a nonempty chain");
    }
    for (std::size_t l = 1; l < chain.size(); ++l) {
        if (!chain[l - 1].subsetOf(chain[l])) {
            throw ConfigurationError("chain is not monotone at position " + std::to_string(l));
        }
    }
    const std::size_t n = lattice->size();
    std::vector<std::size_t> order;
    std::vector<bool> placed(n, false);
    std::vector<std::size_t> prefixes;
    for (const auto& b : chain) {
        IndexedSet reached(b.grid());
        for (std::size_t m = 0; m < n; ++m) {
            if (lattice->member(m).subsetOf(b)) {
                reached = reached | lattice->member(m);
                if (!placed[m]) {
                    placed[m] = true;
                    order.push_back(m);
                }
            }
        }
        if (!(reached == b) || b.empty()) {
            throw ConfigurationError("chain set " + b.toString() + " is not a union of lattice members");
        }
        prefixes.push_back(order.size() - 1);
    }
    for (std::size_t m = 0; m < n; ++m) {
        if (!placed[m]) {
            order.push_back(m);
        }
    }
    return ChainEmbedding{ConsistentOrdering(lattice, std::move(order)), std::move(prefixes)};
}

DiscreteFlow::DiscreteFlow(std::vector<double> times, std::vector<IndexedSet> stages,
                           std::optional<CellMeasure> traceMeasure)
    : times_(std::move(times)), stages_(std::move(stages)), traceMeasure_(std::move(traceMeasure)) {
    if (times_.empty() || times_.size() != stages_.size()) {
        throw ConfigurationError("flow needs one stage per knot time");
    }
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (!(times_[k] > times_[k - 1])) {
            throw ConfigurationError("flow knot times must increase strictly");
        }
        if (!stages_[k - 1].subsetOf(stages_[k])) {
            throw ConfigurationError("flow stages must be nondecreasing under inclusion");
        }
    }
    if (traceMeasure_) {
        for (const auto& s : stages_) {
            traceValues_.push_back(traceMeasure_->measureOf(s));
        }
    }
}

std::vector<double> DiscreteFlow::traceValues() const {
    if (!traceMeasure_) {
        throw ConfigurationError("flow has no trace measure");
    }
    return traceValues_;
}

double DiscreteFlow::trace(double t) const {
    if (!traceMeasure_) {
        throw ConfigurationError("flow has no trace measure");
    }
    if (t < times_.front() || t > times_.back()) {
        throw ConfigurationError("time outside the flow's domain");
    }
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) {
        return traceValues_.back();
    }
    std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    std::size_t lo = hi - 1;
    double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return traceValues_[lo] + w * (traceValues_[hi] - traceValues_[lo]);
}

DiscreteFlow flowFromOrdering(const ConsistentOrdering& ordering, const CellMeasure& measure) {
    std::vector<double> times;
    std::vector<IndexedSet> stages;
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        times.push_back(static_cast<double>(i));
        stages.push_back(ordering.prefixUnion(i));
    }
    return DiscreteFlow(std::move(times), std::move(stages), measure);
}

} // namespace setmarkov
