#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "setmarkov/construction.hpp"
#include "setmarkov/distribution.hpp"
#include "setmarkov/kernel.hpp"
#include "setmarkov/semilattice.hpp"

namespace setmarkov {

using TestFunction = std::function<double(double)>;

/// Which one-sided derivative to use when a time sits on a trace knot.
enum class KnotSide { none, left, right };

/// Test functions by name: x, x2, sin, cos, inv1p, constant, indicator:<value>.
TestFunction namedTestFunction(const std::string& name);

/// One-parameter transition system along a flow, driven by the piecewise-linear trace
/// G(t) = m(f(t)) of the kernel's measure.
class GeneratorModel {
public:
    GeneratorModel(TransitionKernel kernel, std::vector<double> times, std::vector<double> traceValues);

    static GeneratorModel fromFlow(const TransitionKernel& kernel, const DiscreteFlow& flow);

    const TransitionKernel& kernel() const { return kernel_; }
    KernelKind kind() const { return kernel_.kind(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& traceValues() const { return values_; }

    double trace(double t) const;
    /// Slope of the trace; at a knot the side must be chosen explicitly.
    double traceDerivative(double t, KnotSide side = KnotSide::none) const;

    /// Law at time t started from x at time s. Within a leg this is the kernel at the trace
    /// masses; across knots the legs are composed.
    Distribution transition(double s, double t, double x) const;

private:
    void requireTime(double t) const;
    Distribution legTransition(double s, double t, double x) const;

    TransitionKernel kernel_;
    std::vector<double> times_;
    std::vector<double> values_;
};

/// The semigroup T_{st} on a finite grid of evaluation states.
class SemigroupOperator {
public:
    SemigroupOperator(GeneratorModel model, std::vector<double> stateGrid);
    explicit SemigroupOperator(GeneratorModel model);

    const GeneratorModel& model() const { return model_; }
    const std::vector<double>& stateGrid() const { return grid_; }

    /// x -> E[h(Y_t) | Y_s = x], evaluated lazily.
    TestFunction apply(double s, double t, TestFunction h) const;
    std::vector<double> applyOnGrid(double s, double t, const TestFunction& h) const;

private:
    GeneratorModel model_;
    std::vector<double> grid_;
};

/// Counts 0..n for empirical, k/20 on [0, 1] for Dirichlet, 0..10 for the Poisson kinds and
/// 41 points on [-1, 1] for the Gaussian kind.
std::vector<double> defaultStateGrid(const GeneratorModel& model);

/// Step of the centered stencil used for h'' in the Gaussian generator.
inline constexpr double kGaussianStencilStep = 5e-4;

TestFunction closedFormGenerator(const GeneratorModel& model, double s, TestFunction h,
                                 KnotSide side = KnotSide::none);
std::vector<double> closedFormGeneratorOnGrid(const SemigroupOperator& T, double s, const TestFunction& h,
                                              KnotSide side = KnotSide::none);

/// Sup over the state grid of (T_{s,s+eps} h - h) / eps - G_s h, one entry per eps.
std::vector<double> finiteDifferenceGeneratorCheck(const SemigroupOperator& T, double s, std::span<const double> eps,
                                                   const TestFunction& h, KnotSide side = KnotSide::right);

/// x -> integral over [s, t] of (G_v T_{vt} h)(x) dv by 32-node Gauss-Legendre per trace leg.
TestFunction generatorIntegral(const GeneratorModel& model, double s, double t, TestFunction h);

/// Sup over the state grid of |T_{st} h - h - integral of G_v T_{vt} h over [s, t]|.
double integralIdentityResidual(const SemigroupOperator& T, double s, double t, const TestFunction& h);

/// Max over the h-basis of the sup-norm gap between the generator integrals along f over
/// knots [s, t] and along g over knots [u, v].
double assumption4Check(const TransitionKernel& kernel, const DiscreteFlow& f, std::size_t s, std::size_t t,
                        const DiscreteFlow& g, std::size_t u, std::size_t v, std::span<const TestFunction> basis);

/// Indicators of the default grid states plus the coordinate function.
std::vector<TestFunction> defaultTestBasis(const GeneratorModel& model);

struct PermutationIdentityResult {
    /// Sup over x_1 of the semigroup-form gap.
    double exactDefect = 0.0;
    /// Sup over x_1 of the generator-form gap.
    double generatorDefect = 0.0;
    std::size_t skipped = 0;
    std::string detail;

    double defect() const { return std::max(exactDefect, generatorDefect); }
};

/// Level-i identities (i = 2 or 3) relating the f-leg into A_i to the g-leg holding the same
/// neighbourhood, for two orderings of the spec's lattice. Finite-state single kernels only.
/// Level 2 tries every h as h_2; level 3 tries every pair (h_1, h_2).
PermutationIdentityResult permutationIdentityCheck(const FddSpec& spec, const ConsistentOrdering& ord1,
                                                   const ConsistentOrdering& ord2, int level,
                                                   std::span<const TestFunction> functions);

} // namespace setmarkov
