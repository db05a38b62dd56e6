#include <gtest/gtest.h>

#include <cmath>

#include "setmarkov/error.hpp"
#include "setmarkov/kernel.hpp"
#include "test_util.hpp"

using namespace setmarkov;
using namespace setmarkov::testing;

namespace {

double binomialPmf(int n, int k, double p) {
    double c = 1.0;
    for (int i = 0; i < k; ++i) {
        c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

double atomAt(const Distribution& d, double v) {
    double acc = 0.0;
    for (auto [x, p] : d.atoms()) {
        if (std::abs(x - v) < 1e-12) {
            acc += p;
        }
    }
    return acc;
}

struct Fixture2x2 {
    GridPtr g = GroundGrid::make({2, 2});
    IndexedSet s0 = IndexedSet::fromCells(g, {0});
    IndexedSet s01 = IndexedSet::fromCells(g, {0, 1});
    IndexedSet s012 = IndexedSet::fromCells(g, {0, 1, 2});
    IndexedSet s02 = IndexedSet::fromCells(g, {0, 2});
};

std::vector<TransitionKernel> allKinds(const GridPtr& g) {
    return {TransitionKernel::gaussian(CellMeasure::constant(g, 1.0, MeasureKind::intensity)),
            TransitionKernel::poisson(CellMeasure::constant(g, 0.5, MeasureKind::intensity)),
            TransitionKernel::compoundPoisson(CellMeasure::constant(g, 0.5, MeasureKind::intensity), {{-1, 0.3}, {2, 0.7}}),
            TransitionKernel::empirical(3, CellMeasure::uniformProbability(g)),
            TransitionKernel::dirichlet(CellMeasure::constant(g, 1.0, MeasureKind::dirichlet))};
}

} // namespace

TEST(Kernel, IdentityLaw) {
    Fixture2x2 f;
    for (const auto& k : allKinds(f.g)) {
        double x = k.kind() == KernelKind::empirical ? 1.0 / 3.0 : 0.0;
        Distribution d = kernelEval(k, f.s01, f.s01, x);
        EXPECT_TRUE(d.isPointMass()) << toString(k.kind());
        EXPECT_DOUBLE_EQ(d.mean(), x);
    }
}

TEST(Kernel, EmpiricalBinomial) {
    Fixture2x2 f;
    auto k = TransitionKernel::empirical(2, CellMeasure::uniformProbability(f.g));
    Distribution d = kernelEval(k, f.s0, f.s01, 0.0);
    const double p = 0.25 / 0.75;
    EXPECT_NEAR(atomAt(d, 0.0), binomialPmf(2, 0, p), 1e-15);
    EXPECT_NEAR(atomAt(d, 0.5), binomialPmf(2, 1, p), 1e-15);
    EXPECT_NEAR(atomAt(d, 1.0), binomialPmf(2, 2, p), 1e-15);
    EXPECT_NEAR(atomAt(d, 0.0), 4.0 / 9.0, 1e-15);
    EXPECT_NEAR(atomAt(d, 1.0), 1.0 / 9.0, 1e-15);
}

TEST(Kernel, DirichletBeta12) {
    Fixture2x2 f;
    auto k = TransitionKernel::dirichlet(CellMeasure::constant(f.g, 1.0, MeasureKind::dirichlet));
    Distribution d = kernelEval(k, f.s0, f.s01, 0.0);
    EXPECT_NEAR(d.cdf(0.5), 0.75, 1e-12);
    for (double z : {0.1, 0.3, 0.7, 0.95}) {
        EXPECT_NEAR(d.cdf(z), 1.0 - (1.0 - z) * (1.0 - z), 1e-12);
    }
    // mapped to [x, 1]
    Distribution e = kernelEval(k, f.s0, f.s01, 0.5);
    EXPECT_NEAR(e.cdf(0.75), 0.75, 1e-12);
    EXPECT_EQ(e.cdf(0.5 - 1e-9), 0.0);
}

TEST(Kernel, DirichletDegenerate) {
    Fixture2x2 f;
    auto k = TransitionKernel::dirichlet(CellMeasure::constant(f.g, 1.0, MeasureKind::dirichlet));
    Distribution top = kernelEval(k, f.s0, IndexedSet::full(f.g), 0.3);
    EXPECT_TRUE(top.isPointMass());
    EXPECT_DOUBLE_EQ(top.mean(), 1.0);
    Distribution one = kernelEval(k, f.s0, f.s01, 1.0);
    EXPECT_TRUE(one.isPointMass());
    EXPECT_DOUBLE_EQ(one.mean(), 1.0);
}

TEST(Kernel, GaussianInstantiation) {
    auto g = GroundGrid::make({2, 2});
    auto k = TransitionKernel::gaussian(CellMeasure(g, {0.5, 0.25, 1.0, 1.0}, MeasureKind::intensity));
    Distribution d = kernelEval(k, IndexedSet::fromCells(g, {0}), IndexedSet::fromCells(g, {0, 1}), 1.0);
    for (double z : {0.2, 1.0, 1.7}) {
        EXPECT_NEAR(d.cdf(z), 0.5 * std::erfc(-(z - 1.0) / std::sqrt(2.0 * 0.25)), 1e-14);
    }
    EXPECT_DOUBLE_EQ(d.mean(), 1.0);
}

TEST(Kernel, EmpiricalFullMassIsPointMass) {
    auto g = GroundGrid::make({2});
    auto k = TransitionKernel::empirical(2, CellMeasure(g, {1.0, 0.0}, MeasureKind::probability));
    Distribution d = kernelEval(k, IndexedSet::fromCells(g, {0}), IndexedSet::full(g), 0.5);
    EXPECT_TRUE(d.isPointMass());
    EXPECT_DOUBLE_EQ(d.mean(), 0.5);
}

TEST(Kernel, InclusionRequired) {
    Fixture2x2 f;
    for (const auto& k : allKinds(f.g)) {
        EXPECT_THROW(kernelEval(k, f.s01, f.s02, 0.0), ConfigurationError);
        EXPECT_THROW(composeKernels(k, f.s01, f.s0, f.s012, 0.0), ConfigurationError);
    }
}

TEST(Compose, IdentityTriple) {
    Fixture2x2 f;
    for (const auto& k : allKinds(f.g)) {
        Distribution d = composeKernels(k, f.s01, f.s01, f.s01, 0.0);
        EXPECT_TRUE(d.isPointMass());
    }
}

TEST(Compose, EmpiricalExact) {
    Fixture2x2 f;
    auto k = TransitionKernel::empirical(1, CellMeasure::uniformProbability(f.g));
    Distribution composed = composeKernels(k, f.s0, f.s01, f.s012, 0.0);
    Distribution direct = kernelEval(k, f.s0, f.s012, 0.0);
    for (double v : {0.0, 1.0}) {
        EXPECT_NEAR(atomAt(composed, v), atomAt(direct, v), 1e-15);
    }
    EXPECT_NEAR(atomAt(direct, 1.0), 2.0 / 3.0, 1e-15);
}

TEST(Compose, GaussianVariancesAdd) {
    auto g = GroundGrid::make({2, 2});
    CellMeasure lambda(g, {0.3, 0.7, 1.1, 0.2}, MeasureKind::intensity);
    auto k = TransitionKernel::gaussian(lambda);
    auto B = IndexedSet::fromCells(g, {0});
    auto Bp = IndexedSet::fromCells(g, {0, 1});
    auto Bpp = IndexedSet::fromCells(g, {0, 1, 2});
    double var = lambda.measureOf(Bpp - B);
    EXPECT_NEAR(var, lambda.measureOf(Bp - B) + lambda.measureOf(Bpp - Bp), 1e-15);
    Distribution composed = composeKernels(k, B, Bp, Bpp, 0.5);
    for (double z : {-1.0, 0.0, 0.5, 1.3, 2.5}) {
        EXPECT_NEAR(composed.cdf(z), 0.5 * std::erfc(-(z - 0.5) / std::sqrt(2.0 * var)), 1e-6);
    }
}

TEST(ChapmanKolmogorov, EmpiricalAllPrefixTriples) {
    auto g = GroundGrid::make({4, 4});
    for (const auto& lat : {threeSetLattice(GroundGrid::make({2, 2})), sixSetLattice(g)}) {
        auto k = TransitionKernel::empirical(3, CellMeasure::uniformProbability(lat->grid()));
        std::vector<double> states{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
        for (const auto& ord : enumerateConsistentOrderings(lat)) {
            for (std::size_t i = 0; i < ord.size(); ++i) {
                for (std::size_t j = i; j < ord.size(); ++j) {
                    for (std::size_t l = j; l < ord.size(); ++l) {
                        EXPECT_LT(chapmanKolmogorovDefect(k, ord.prefixUnion(i), ord.prefixUnion(j),
                                                          ord.prefixUnion(l), states),
                                  1e-12);
                    }
                }
            }
        }
    }
}

TEST(ChapmanKolmogorov, PoissonKinds) {
    Fixture2x2 f;
    auto kinds = allKinds(f.g);
    for (std::size_t i : {1u, 2u}) {
        EXPECT_LT(chapmanKolmogorovDefect(kinds[i], f.s0, f.s01, f.s012, {0.0, 2.0}), 1e-12);
    }
}

TEST(ChapmanKolmogorov, Gaussian) {
    Fixture2x2 f;
    auto k = TransitionKernel::gaussian(CellMeasure::constant(f.g, 1.0, MeasureKind::intensity));
    EXPECT_LT(chapmanKolmogorovDefect(k, f.s0, f.s01, f.s012, {-1.0, 0.0, 2.0}), 1e-6);
}

TEST(ChapmanKolmogorov, DirichletQuadrature) {
    Fixture2x2 f;
    auto k = TransitionKernel::dirichlet(CellMeasure(f.g, {0.5, 1.0, 1.5, 2.0}, MeasureKind::dirichlet));
    EXPECT_LT(chapmanKolmogorovDefect(k, f.s0, f.s01, f.s012, {0.0, 0.4}), 1e-7);
}

TEST(ChapmanKolmogorov, DirichletMonteCarlo) {
    Fixture2x2 f;
    auto k = TransitionKernel::dirichlet(CellMeasure::constant(f.g, 1.0, MeasureKind::dirichlet));
    MonteCarloDefect mc = chapmanKolmogorovMonteCarlo(k, f.s0, f.s01, f.s012, 0.0, 100000, 17);
    EXPECT_GT(mc.standardError, 0.0);
    EXPECT_LT(mc.defect, 3.0 * mc.standardError);
}

TEST(ChapmanKolmogorov, CorruptedFails) {
    Fixture2x2 f;
    auto k = TransitionKernel::empirical(1, CellMeasure::uniformProbability(f.g), true);
    EXPECT_GT(chapmanKolmogorovDefect(k, f.s0, f.s01, f.s012, {0.0, 1.0}), 0.01);
}

TEST(Kernel, EmpiricalMarginalsAreBinomial) {
    auto g = GroundGrid::make({4, 4});
    auto lat = sixSetLattice(g);
    std::vector<double> w(16);
    for (std::size_t c = 0; c < 16; ++c) {
        w[c] = static_cast<double>(c + 1);
    }
    double total = 0.0;
    for (double x : w) {
        total += x;
    }
    for (auto& x : w) {
        x /= total;
    }
    CellMeasure F(g, w, MeasureKind::probability);
    const int n = 4;
    auto k = TransitionKernel::empirical(n, F);
    Distribution mu = k.initialLaw(lat->minSet());
    for (const auto& A : lat->members()) {
        std::map<long, double> pushed;
        for (auto [x, p] : mu.atoms()) {
            for (auto [y, q] : kernelEval(k, lat->minSet(), A, x).atoms()) {
                pushed[std::lround(y * n)] += p * q;
            }
        }
        double tv = 0.0;
        for (int j = 0; j <= n; ++j) {
            tv += std::abs(pushed[j] - binomialPmf(n, j, F.measureOf(A)));
        }
        EXPECT_LT(0.5 * tv, 1e-12) << A.toString();
    }
}

TEST(Kernel, IidDependsOnIncrementMeasureOnly) {
    auto g = GroundGrid::make({2, 2});
    CellMeasure lambda(g, {0.4, 0.6, 0.6, 0.1}, MeasureKind::intensity);
    auto a = IndexedSet::fromCells(g, {0});
    auto b = IndexedSet::fromCells(g, {0, 1});
    auto c = IndexedSet::fromCells(g, {3});
    auto d = IndexedSet::fromCells(g, {2, 3});
    for (auto k : {TransitionKernel::gaussian(lambda), TransitionKernel::poisson(lambda)}) {
        Distribution x = kernelEval(k, a, b, 1.0);
        Distribution y = kernelEval(k, c, d, 1.0);
        for (double z : cdfProbeGrid(x)) {
            EXPECT_DOUBLE_EQ(x.cdf(z), y.cdf(z));
        }
    }
}

TEST(Kernel, DirichletSamplesMonotoneInUnitInterval) {
    Fixture2x2 f;
    auto k = TransitionKernel::dirichlet(CellMeasure(f.g, {0.3, 0.9, 0.2, 0.6}, MeasureKind::dirichlet));
    Distribution mu = k.initialLaw(f.s0);
    for (std::uint64_t s = 0; s < 2000; ++s) {
        StreamRng rng(5, s, 0);
        double x = mu.sample(rng);
        double y = kernelEval(k, f.s0, f.s01, x).sample(rng);
        double z = kernelEval(k, f.s01, f.s012, y).sample(rng);
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, y);
        EXPECT_LE(y, z);
        EXPECT_LE(z, 1.0);
    }
}

TEST(Kernel, InitialLaws) {
    Fixture2x2 f;
    auto emp = TransitionKernel::empirical(2, CellMeasure::uniformProbability(f.g));
    EXPECT_NEAR(atomAt(emp.initialLaw(f.s0), 0.5), binomialPmf(2, 1, 0.25), 1e-15);
    auto dir = TransitionKernel::dirichlet(CellMeasure::constant(f.g, 1.0, MeasureKind::dirichlet));
    // beta(1, 3)
    EXPECT_NEAR(dir.initialLaw(f.s0).cdf(0.5), 1.0 - std::pow(0.5, 3), 1e-12);
    auto zero = TransitionKernel::poisson(CellMeasure::constant(f.g, 1.0, MeasureKind::intensity), InitialChoice::zero);
    EXPECT_TRUE(zero.initialLaw(f.s0).isPointMass());
}

TEST(CompoundPoisson, UnitJumpsArePoisson) {
    CountPmf unit{{1, 1.0}};
    auto counts = compoundPoissonCounts(1.3, unit);
    for (auto [v, p] : counts) {
        double oracle = std::exp(-1.3) * std::pow(1.3, static_cast<double>(v)) / std::tgamma(static_cast<double>(v) + 1.0);
        EXPECT_NEAR(p, oracle, 1e-15);
    }
    CountPmf two{{2, 1.0}};
    for (auto [v, p] : compoundPoissonCounts(0.7, two)) {
        EXPECT_EQ(v % 2, 0);
        (void)p;
    }
}

TEST(ProcessModel, ValidatesComponents) {
    Fixture2x2 f;
    auto a = TransitionKernel::empirical(2, CellMeasure::uniformProbability(f.g));
    auto b = TransitionKernel::dirichlet(CellMeasure::constant(f.g, 1.0, MeasureKind::dirichlet));
    EXPECT_THROW(ProcessModel({{0.5, a}, {0.5, b}}), ConfigurationError);
    EXPECT_THROW(ProcessModel({{0.5, a}, {0.4, a}}), ConfigurationError);
    EXPECT_NO_THROW(ProcessModel({{0.5, a}, {0.5, a}}));
}
