#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "setmarkov/distribution.hpp"
#include "setmarkov/kernel.hpp"
#include "setmarkov/semilattice.hpp"

namespace setmarkov {

/// A construction instance: lattice, consistent ordering, process and initial law.
class FddSpec {
public:
    /// An initial override must be discrete with atoms on the process lattice for exact tables.
    FddSpec(ConsistentOrdering ordering, ProcessModel process, std::optional<Distribution> initial = std::nullopt);

    const LatticePtr& lattice() const { return ordering_.lattice(); }
    const ConsistentOrdering& ordering() const { return ordering_; }
    const ProcessModel& process() const { return process_; }
    const std::optional<Distribution>& initialOverride() const { return initial_; }
    const LeftNeighbourhoods& neighbourhoods() const { return *neighbourhoods_; }
    std::shared_ptr<const LeftNeighbourhoods> neighbourhoodsPtr() const { return neighbourhoods_; }

    /// Initial law of the given mixture component.
    Distribution initialLaw(std::size_t component = 0) const;

    /// Same process and initial law under another ordering of the same lattice.
    FddSpec withOrdering(ConsistentOrdering ordering) const;

private:
    ConsistentOrdering ordering_;
    ProcessModel process_;
    std::optional<Distribution> initial_;
    std::shared_ptr<const LeftNeighbourhoods> neighbourhoods_;
};

/// Sparse joint pmf of integer-coded variables; the real value of code c is c * unit.
struct JointLaw {
    std::vector<std::string> variables;
    double unit = 1.0;
    std::map<std::vector<std::int64_t>, double> table;

    double totalProbability() const;
    /// Law of the listed axes, in the listed order.
    JointLaw marginal(std::span<const std::size_t> axes) const;
    /// Law of the sums of the listed groups of axes.
    JointLaw pushforward(std::vector<std::string> labels, const std::vector<std::vector<std::size_t>>& groups) const;
};

double totalVariation(const JointLaw& a, const JointLaw& b);

/// Maximum number of table entries before exact computation gives up.
inline constexpr std::size_t kMaxTableEntries = 10'000'000;

/// Joint pmf of (X_{C_0}, ..., X_{C_n}) over the ordering's left neighbourhoods.
JointLaw exactFdd(const FddSpec& spec);

/// One realization: the increments over C_0, ..., C_n of the spec's ordering.
class ProcessSample {
public:
    ProcessSample(std::vector<double> increments, std::shared_ptr<const LeftNeighbourhoods> neighbourhoods)
        : increments_(std::move(increments)), neighbourhoods_(std::move(neighbourhoods)) {}

    const std::vector<double>& increments() const { return increments_; }
    const LeftNeighbourhoods& neighbourhoods() const { return *neighbourhoods_; }
    /// Sum of the increments over the neighbourhoods covering target; 0 on the empty set.
    double value(const IndexedSet& target) const;

private:
    std::vector<double> increments_;
    std::shared_ptr<const LeftNeighbourhoods> neighbourhoods_;
};

/// Draws sample s from the streams (seed, s, member index); the result does not depend on threads.
std::vector<ProcessSample> sampleFdd(const FddSpec& spec, std::uint64_t seed, std::size_t count,
                                     unsigned threads = 1);

double evaluateOnAlgebra(const ProcessSample& sample, const IndexedSet& target);
/// X over A \ B for member unions A and B.
double evaluateOnAlgebra(const ProcessSample& sample, const IndexedSet& A, const IndexedSet& B);

/// Pushforward of exactFdd through the summing map over the spec's left neighbourhoods.
JointLaw jointOverIncrements(const FddSpec& spec, std::span<const IndexedSet> tuple);

/// A set of C(u) written as the union over terms of A_k \ (B_k1 ∪ ... ∪ B_km).
struct CRepresentation {
    struct Term {
        IndexedSet positive;
        std::vector<IndexedSet> negatives;
    };
    std::vector<Term> terms;

    IndexedSet set() const;
};

/// Pushforward computed on the minimal semilattice generated by ∅′ and every set in the
/// representations, under its canonical ordering.
JointLaw jointOverIncrements(const FddSpec& spec, std::span<const CRepresentation> tuple);

} // namespace setmarkov
