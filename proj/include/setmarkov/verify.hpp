#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "setmarkov/construction.hpp"
#include "setmarkov/kernel.hpp"
#include "setmarkov/semilattice.hpp"

namespace setmarkov {

struct CheckResult {
    double defect = 0.0;
    /// Monte Carlo standard error of the defect; 0 for exact checks.
    double standardError = 0.0;
    /// Conditioning events below 1e-12 (exact) or probe events with zero variance (Monte Carlo).
    std::size_t skipped = 0;
    std::string detail;
};

struct MonteCarloOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

using KeyFunction = std::function<std::vector<std::int64_t>(const std::vector<std::int64_t>&)>;

/// Max over `fine` values of positive probability of TV(law(target | fine), law(target | coarse)).
/// coarse must be a function of fine.
CheckResult conditionalIndependenceDefect(const JointLaw& law, const KeyFunction& target, const KeyFunction& fine,
                                          const KeyFunction& coarse);

/// Distance between the increment laws under two orderings, variables matched by lattice member.
/// Exact TV for finite-state processes; otherwise the Monte Carlo probe-event defect.
CheckResult checkAssumption1(const FddSpec& spec, const ConsistentOrdering& ord1, const ConsistentOrdering& ord2,
                             const MonteCarloOptions& mc = {});

/// The Monte Carlo probe-event defect of checkAssumption1 for samples already drawn under ord1 and ord2.
CheckResult compareOrderingSamples(const ConsistentOrdering& ord1, const std::vector<ProcessSample>& first,
                                   const ConsistentOrdering& ord2, const std::vector<ProcessSample>& second);

/// law(X_{A\B} | X over each partition cell) against law(X_{A\B} | X_B).
CheckResult checkSetMarkov(const FddSpec& spec, const IndexedSet& A, const IndexedSet& B,
                           std::span<const IndexedSet> partition);

/// law((X_{A_i \ B})_i | increments inside B) against law(same | X_B).
CheckResult checkIncrementVectorIndependence(const FddSpec& spec, const IndexedSet& B,
                                             std::span<const IndexedSet> sets);

/// Classical Markov defect of the chain of values at the flow's knots.
CheckResult checkFlowMarkov(const FddSpec& spec, const DiscreteFlow& flow);

/// Distance between the kernels composed along f from knot s to t and along g from u to v.
CheckResult checkMatching(const TransitionKernel& kernel, const DiscreteFlow& f, std::size_t s, std::size_t t,
                          const DiscreteFlow& g, std::size_t u, std::size_t v, const std::vector<double>& states);

/// The law from x composed along the flow's knots from `from` to `to`.
Distribution composeAlongFlow(const TransitionKernel& kernel, const DiscreteFlow& flow, std::size_t from,
                              std::size_t to, double x);

} // namespace setmarkov
