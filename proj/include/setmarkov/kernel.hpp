#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "setmarkov/distribution.hpp"
#include "setmarkov/grid.hpp"
#include "setmarkov/indexed_set.hpp"

namespace setmarkov {

enum class KernelKind { gaussian, poisson, compoundPoisson, empirical, dirichlet };

std::string toString(KernelKind kind);
KernelKind kernelKindFromString(const std::string& name);

/// Initial law of X at ∅′ for the independent-increment kinds.
enum class InitialChoice { marginal, zero };

/// Integer-valued pmf as (value, probability) pairs sorted by value.
using CountPmf = std::vector<std::pair<std::int64_t, double>>;

/// Q_{BB'}(x; .) for one of the built-in families, together with its initial law.
///
/// Every law depends on (B, B') only through m(B), m(B' \ B) and the total mass, so the same
/// object also drives the one-parameter models along flows.
class TransitionKernel {
public:
    static TransitionKernel gaussian(CellMeasure lambda, InitialChoice initial = InitialChoice::marginal);
    static TransitionKernel poisson(CellMeasure lambda, InitialChoice initial = InitialChoice::marginal);
    /// Jumps are nonzero integers with probabilities summing to 1.
    static TransitionKernel compoundPoisson(CellMeasure lambda, CountPmf jumps,
                                            InitialChoice initial = InitialChoice::marginal);
    /// With corrupted set, the success probability is F(B' \ B) instead of F(B' \ B) / (1 - F(B)).
    static TransitionKernel empirical(int n, CellMeasure F, bool corrupted = false);
    static TransitionKernel dirichlet(CellMeasure alpha);

    KernelKind kind() const { return kind_; }
    const CellMeasure& measure() const { return measure_; }
    const GridPtr& grid() const { return measure_.grid(); }
    int n() const { return n_; }
    bool corrupted() const { return corrupted_; }
    const CountPmf& jumps() const { return jumps_; }
    InitialChoice initialChoice() const { return initialChoice_; }

    /// Empirical, Poisson and compound-Poisson kernels take values on a lattice unit() * Z.
    bool finiteState() const;
    /// 1/n for empirical, 1 for the Poisson kinds, 0 for continuous kinds.
    double unit() const;

    Distribution eval(const IndexedSet& B, const IndexedSet& Bp, double x) const;
    /// Law of X at the minimal set `bottom`.
    Distribution initialLaw(const IndexedSet& bottom) const;

    /// The law given the masses m(B), m(B' \ B); used along flows.
    Distribution evalMasses(double fromMass, double stepMass, double x) const;

    /// Increment pmf in units, from state `count`, for finite-state kinds.
    CountPmf incrementCounts(const IndexedSet& B, const IndexedSet& Bp, std::int64_t count) const;
    CountPmf initialCounts(const IndexedSet& bottom) const;

    /// Rounds a state value to its lattice count; throws if x is not on the lattice.
    std::int64_t toCount(double x) const;

    std::string describe() const;

private:
    TransitionKernel(KernelKind kind, CellMeasure measure) : kind_(kind), measure_(std::move(measure)) {}

    void requireInclusion(const IndexedSet& B, const IndexedSet& Bp) const;
    CountPmf stepCounts(double fromMass, double stepMass, std::int64_t count) const;

    KernelKind kind_;
    CellMeasure measure_;
    int n_ = 0;
    bool corrupted_ = false;
    CountPmf jumps_;
    InitialChoice initialChoice_ = InitialChoice::marginal;
};

/// Law of the sum of a Poisson(lambda) number of iid jumps, truncated once the Poisson tail is below 1e-16.
CountPmf compoundPoissonCounts(double lambda, const CountPmf& jumps);

Distribution kernelEval(const TransitionKernel& k, const IndexedSet& B, const IndexedSet& Bp, double x);

/// Exact pmf composition for finite-state kinds; otherwise a compound law whose cdf is
/// computed by quadrature.
Distribution composeKernels(const TransitionKernel& k, const IndexedSet& B, const IndexedSet& Bp,
                            const IndexedSet& Bpp, double x);

/// Total-variation distance between two discrete laws.
double totalVariation(const Distribution& a, const Distribution& b);

/// Probe grid of 101 points spanning the bulk of a law.
std::vector<double> cdfProbeGrid(const Distribution& law);

/// Max over x of the TV (finite-state) or 101-probe sup-cdf (continuous) distance between
/// the composed and direct laws.
double chapmanKolmogorovDefect(const TransitionKernel& k, const IndexedSet& B, const IndexedSet& Bp,
                               const IndexedSet& Bpp, const std::vector<double>& states);

struct MonteCarloDefect {
    double defect = 0.0;
    double standardError = 0.0;
};

/// Sup over the probe grid of |ecdf of composed draws - direct cdf|, with the largest
/// per-probe binomial standard error sqrt(F(1-F)/N).
MonteCarloDefect chapmanKolmogorovMonteCarlo(const TransitionKernel& k, const IndexedSet& B, const IndexedSet& Bp,
                                             const IndexedSet& Bpp, double x, std::size_t samples,
                                             std::uint64_t seed);

/// Weighted mixture of kernels, the component being chosen once with the initial draw.
class ProcessModel {
public:
    struct Component {
        double weight;
        TransitionKernel kernel;
    };

    ProcessModel(TransitionKernel kernel); // NOLINT(google-explicit-constructor)
    explicit ProcessModel(std::vector<Component> components);

    const std::vector<Component>& components() const { return components_; }
    bool isMixture() const { return components_.size() > 1; }
    const TransitionKernel& kernel() const { return components_.front().kernel; }
    bool finiteState() const;
    double unit() const;
    const GridPtr& grid() const { return kernel().grid(); }

private:
    std::vector<Component> components_;
};

} // namespace setmarkov
