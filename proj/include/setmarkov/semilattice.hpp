#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "setmarkov/grid.hpp"
#include "setmarkov/indexed_set.hpp"

namespace setmarkov {

/// A finite family of sets closed under intersection, with minimal nonempty member ∅′.
///
/// Members are kept sorted by (cell count, mask value), so index 0 is always ∅′ and
/// a proper subset always has a smaller index than its superset.
class Semilattice {
public:
    /// Validates closure; members are re-sorted and deduplicated.
    explicit Semilattice(std::vector<IndexedSet> members);

    /// Smallest ∩-closed family containing the generators.
    static Semilattice closeUnderIntersection(std::span<const IndexedSet> generators);

    const std::vector<IndexedSet>& members() const { return members_; }
    const IndexedSet& member(std::size_t i) const { return members_.at(i); }
    std::size_t size() const { return members_.size(); }
    const IndexedSet& minSet() const { return members_.front(); }
    const GridPtr& grid() const { return members_.front().grid(); }

    std::optional<std::size_t> indexOf(const IndexedSet& s) const;
    /// true iff member i is a proper subset of member j
    bool properSubset(std::size_t i, std::size_t j) const { return below_[i][j]; }
    IndexedSet unionOfMembers() const;

private:
    std::vector<IndexedSet> members_;
    std::vector<std::vector<bool>> below_;
};

using LatticePtr = std::shared_ptr<const Semilattice>;

LatticePtr makeLattice(std::span<const IndexedSet> generators);

/// Enumeration A_0 = ∅′, A_1, ..., A_n of a semilattice in which no set precedes any of its subsets.
class ConsistentOrdering {
public:
    /// Throws ConfigurationError unless order is a permutation satisfying subset precedence.
    ConsistentOrdering(LatticePtr lattice, std::vector<std::size_t> order);

    /// The identity permutation, which is consistent because members are sorted by size.
    static ConsistentOrdering canonical(LatticePtr lattice);

    const LatticePtr& lattice() const { return lattice_; }
    const std::vector<std::size_t>& order() const { return order_; }
    std::size_t size() const { return order_.size(); }
    const IndexedSet& at(std::size_t position) const { return lattice_->member(order_.at(position)); }
    std::size_t memberAt(std::size_t position) const { return order_.at(position); }
    std::size_t positionOf(std::size_t member) const { return position_.at(member); }
    /// A_0 ∪ ... ∪ A_position
    IndexedSet prefixUnion(std::size_t position) const;

    bool operator==(const ConsistentOrdering& other) const {
        return lattice_ == other.lattice_ && order_ == other.order_;
    }

private:
    LatticePtr lattice_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> position_;
};

/// All consistent orderings in lexicographic order of member indices.
/// Throws CapacityError when more than cap orderings exist.
std::vector<ConsistentOrdering> enumerateConsistentOrderings(const LatticePtr& lattice,
                                                            std::size_t cap = 10000);

/// Left neighbourhoods C_0 = A_0 and C_i = A_i \ (A_0 ∪ ... ∪ A_{i-1}), indexed by ordering position.
class LeftNeighbourhoods {
public:
    explicit LeftNeighbourhoods(const ConsistentOrdering& ordering);

    std::size_t size() const { return sets_.size(); }
    const IndexedSet& at(std::size_t position) const { return sets_.at(position); }
    const std::vector<IndexedSet>& sets() const { return sets_; }
    /// Lattice member whose left neighbourhood sits at the given position.
    std::size_t memberAt(std::size_t position) const { return members_.at(position); }
    std::size_t positionOfMember(std::size_t member) const;

    /// Positions whose union is target; throws DecompositionError naming the offending cells.
    std::vector<std::size_t> decompose(const IndexedSet& target) const;

private:
    std::vector<IndexedSet> sets_;
    std::vector<std::size_t> members_;
};

LeftNeighbourhoods leftNeighbourhoods(const ConsistentOrdering& ordering);

/// Ordering-free form: A_i \ ∪ {A in lattice : A_i ⊄ A}. For ∅′ this returns ∅′ itself.
IndexedSet leftNeighbourhoodOf(const Semilattice& lattice, std::size_t member);

/// Drops, in index order, every part contained in the union of the remaining parts.
std::vector<IndexedSet> extremalRepresentation(std::span<const IndexedSet> parts);

struct ChainEmbedding {
    ConsistentOrdering ordering;
    /// B_l = A_0 ∪ ... ∪ A_{prefixIndices[l]}
    std::vector<std::size_t> prefixIndices;
};

/// Finds a consistent ordering whose prefix unions hit every set of a monotone chain.
ChainEmbedding embedChain(std::span<const IndexedSet> chain, const LatticePtr& lattice);

/// Monotone chain of sets at increasing knot times, with an optional measure whose
/// trace t -> m(f(t)) is interpolated linearly between knots.
class DiscreteFlow {
public:
    DiscreteFlow(std::vector<double> times, std::vector<IndexedSet> stages,
                 std::optional<CellMeasure> traceMeasure = std::nullopt);

    const std::vector<double>& times() const { return times_; }
    const std::vector<IndexedSet>& stages() const { return stages_; }
    std::size_t knots() const { return times_.size(); }
    const std::optional<CellMeasure>& traceMeasure() const { return traceMeasure_; }

    /// Measure of the stage at each knot.
    std::vector<double> traceValues() const;
    double trace(double t) const;

private:
    std::vector<double> times_;
    std::vector<IndexedSet> stages_;
    std::optional<CellMeasure> traceMeasure_;
    std::vector<double> traceValues_;
};

/// t_i = i and f(t_i) = A_0 ∪ ... ∪ A_i.
DiscreteFlow flowFromOrdering(const ConsistentOrdering& ordering, const CellMeasure& measure);

} // namespace setmarkov
