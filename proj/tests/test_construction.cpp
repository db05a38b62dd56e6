#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "setmarkov/construction.hpp"
#include "setmarkov/error.hpp"
#include "test_util.hpp"

using namespace setmarkov;
using namespace setmarkov::testing;

namespace {

using Table = std::map<std::vector<std::int64_t>, double>;

/// Joint law of the counts in cells {0}, {1}, {2} over all cellCount^n equally likely placements.
Table placementOracle(int n, std::size_t cells) {
    Table out;
    std::vector<std::size_t> where(static_cast<std::size_t>(n), 0);
    const double each = std::pow(static_cast<double>(cells), -n);
    while (true) {
        std::vector<std::int64_t> counts(3, 0);
        for (std::size_t c : where) {
            if (c < 3) {
                ++counts[c];
            }
        }
        out[counts] += each;
        std::size_t i = 0;
        while (i < where.size() && ++where[i] == cells) {
            where[i++] = 0;
        }
        if (i == where.size()) {
            break;
        }
    }
    return out;
}

FddSpec empiricalSpec(int n, const LatticePtr& lat) {
    return FddSpec(ConsistentOrdering::canonical(lat), TransitionKernel::empirical(n, CellMeasure::uniformProbability(lat->grid())));
}

double variance(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m += x;
    }
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return s / static_cast<double>(v.size() - 1);
}

} // namespace

TEST(ExactFdd, EmpiricalOnePoint) {
    auto lat = threeSetLattice(GroundGrid::make({2, 2}));
    for (const auto& ord : enumerateConsistentOrderings(lat)) {
        FddSpec spec(ord, TransitionKernel::empirical(1, CellMeasure::uniformProbability(lat->grid())));
        JointLaw law = exactFdd(spec);
        EXPECT_EQ(law.variables, (std::vector<std::string>{"C0", "C1", "C2"}));
        ASSERT_EQ(law.table.size(), 4u);
        for (const auto& key : std::vector<std::vector<std::int64_t>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}}) {
            EXPECT_NEAR(law.table.at(key), 0.25, 1e-15);
        }
    }
}

TEST(ExactFdd, EmpiricalTwoPointsMatchesPlacements) {
    auto lat = threeSetLattice(GroundGrid::make({2, 2}));
    JointLaw law = exactFdd(empiricalSpec(2, lat));
    Table oracle = placementOracle(2, 4);
    ASSERT_EQ(law.table.size(), oracle.size());
    for (const auto& [k, p] : oracle) {
        EXPECT_NEAR(law.table.at(k), p, 1e-15);
    }
}

TEST(ExactFdd, EmpiricalThreePointsMatchesPlacements) {
    auto lat = threeSetLattice(GroundGrid::make({2, 2}));
    JointLaw law = exactFdd(empiricalSpec(3, lat));
    Table oracle = placementOracle(3, 4);
    for (const auto& [k, p] : oracle) {
        EXPECT_NEAR(law.table.at(k), p, 1e-15);
    }
    EXPECT_NEAR(law.totalProbability(), 1.0, 1e-12);
}

TEST(ExactFdd, SingleSetIsInitialLaw) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> gens{IndexedSet::fromCells(g, {0})};
    auto spec = empiricalSpec(2, makeLattice(gens));
    JointLaw law = exactFdd(spec);
    Distribution mu = spec.initialLaw();
    ASSERT_EQ(law.table.size(), 3u);
    for (auto [v, p] : mu.atoms()) {
        EXPECT_NEAR(law.table.at({std::llround(v * 2)}), p, 1e-15);
    }
}

TEST(ExactFdd, ContinuousUnsupported) {
    auto lat = threeSetLattice(GroundGrid::make({2, 2}));
    FddSpec spec(ConsistentOrdering::canonical(lat),
                 TransitionKernel::gaussian(CellMeasure::constant(lat->grid(), 1.0, MeasureKind::intensity)));
    EXPECT_THROW(exactFdd(spec), UnsupportedError);
}

TEST(ExactFdd, PrefixMarginalMatchesKernelPush) {
    auto g = GroundGrid::make({4, 4});
    auto lat = sixSetLattice(g);
    auto spec = empiricalSpec(2, lat);
    JointLaw law = exactFdd(spec);
    const auto& k = spec.process().kernel();
    for (std::size_t i = 0; i < lat->size(); ++i) {
        std::vector<std::size_t> group;
        for (std::size_t p = 0; p <= i; ++p) {
            group.push_back(p);
        }
        JointLaw m = law.pushforward({"B"}, {group});
        std::map<std::int64_t, double> push;
        for (auto [x, p] : spec.initialLaw().atoms()) {
            for (auto [y, q] : kernelEval(k, lat->minSet(), spec.ordering().prefixUnion(i), x).atoms()) {
                push[std::llround(y * 2)] += p * q;
            }
        }
        for (auto [c, p] : push) {
            EXPECT_NEAR(m.table[{c}], p, 1e-14);
        }
    }
}

TEST(Sample, ZeroMassIncrements) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    FddSpec spec(ConsistentOrdering::canonical(lat), TransitionKernel::empirical(3, CellMeasure(g, {0.5, 0.0, 0.0, 0.5}, MeasureKind::probability)));
    for (const auto& s : sampleFdd(spec, 4, 200)) {
        EXPECT_EQ(s.increments()[1], 0.0);
        EXPECT_EQ(s.increments()[2], 0.0);
    }
}

TEST(Sample, GaussianVariance) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    CellMeasure lambda = CellMeasure::constant(g, 1.0, MeasureKind::intensity);
    FddSpec spec(ConsistentOrdering::canonical(lat), TransitionKernel::gaussian(lambda));
    const std::size_t N = 100000;
    auto samples = sampleFdd(spec, 99, N);
    std::vector<double> c1;
    for (const auto& s : samples) {
        c1.push_back(s.increments()[1]);
    }
    double target = lambda.measureOf(spec.neighbourhoods().at(1));
    // SE of the sample variance of a normal: sigma^2 sqrt(2 / (N - 1))
    double se = target * std::sqrt(2.0 / static_cast<double>(N - 1));
    EXPECT_LT(std::abs(variance(c1) - target), 3.0 * se);
}

TEST(Sample, DeterministicAcrossRunsAndThreads) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    FddSpec spec(ConsistentOrdering::canonical(lat), TransitionKernel::dirichlet(CellMeasure::constant(g, 1.0, MeasureKind::dirichlet)));
    auto a = sampleFdd(spec, 12, 500, 1);
    auto b = sampleFdd(spec, 12, 500, 1);
    auto c = sampleFdd(spec, 12, 500, 4);
    for (std::size_t s = 0; s < a.size(); ++s) {
        EXPECT_EQ(a[s].increments(), b[s].increments());
        EXPECT_EQ(a[s].increments(), c[s].increments());
    }
    auto d = sampleFdd(spec, 13, 500, 1);
    EXPECT_NE(a[0].increments(), d[0].increments());
}

TEST(Algebra, DisjointUnionAndEmpty) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    auto spec = empiricalSpec(3, lat);
    const auto& nb = spec.neighbourhoods();
    for (const auto& s : sampleFdd(spec, 1, 50)) {
        EXPECT_DOUBLE_EQ(evaluateOnAlgebra(s, nb.at(1) | nb.at(2)), s.increments()[1] + s.increments()[2]);
        EXPECT_EQ(evaluateOnAlgebra(s, IndexedSet(g)), 0.0);
        EXPECT_DOUBLE_EQ(evaluateOnAlgebra(s, lat->member(2), lat->member(1)), s.increments()[2]);
    }
    auto s = sampleFdd(spec, 1, 1).front();
    EXPECT_THROW(evaluateOnAlgebra(s, IndexedSet::fromCells(g, {3})), DecompositionError);
}

TEST(Algebra, InclusionExclusion) {
    auto g = GroundGrid::make({4, 4});
    auto lat = sixSetLattice(g);
    FddSpec spec(ConsistentOrdering::canonical(lat), TransitionKernel::gaussian(CellMeasure::constant(g, 1.0, MeasureKind::intensity)));
    for (const auto& s : sampleFdd(spec, 3, 200)) {
        for (const auto& A : lat->members()) {
            for (const auto& B : lat->members()) {
                double lhs = evaluateOnAlgebra(s, A | B) + evaluateOnAlgebra(s, A & B);
                double rhs = evaluateOnAlgebra(s, A) + evaluateOnAlgebra(s, B);
                EXPECT_NEAR(lhs, rhs, 1e-9);
            }
        }
    }
}

TEST(JointOverIncrements, AllNeighbourhoodsIsIdentity) {
    auto lat = threeSetLattice(GroundGrid::make({2, 2}));
    auto spec = empiricalSpec(2, lat);
    JointLaw a = exactFdd(spec);
    JointLaw b = jointOverIncrements(spec, spec.neighbourhoods().sets());
    EXPECT_LT(totalVariation(a, b), 1e-15);
}

TEST(JointOverIncrements, UnionOfTwoNeighbourhoods) {
    auto lat = threeSetLattice(GroundGrid::make({2, 2}));
    auto spec = empiricalSpec(1, lat);
    const auto& nb = spec.neighbourhoods();
    std::vector<IndexedSet> tuple{nb.at(1) | nb.at(2)};
    JointLaw law = jointOverIncrements(spec, tuple);
    ASSERT_EQ(law.table.size(), 2u);
    EXPECT_NEAR(law.table.at({0}), 0.5, 1e-15);
    EXPECT_NEAR(law.table.at({1}), 0.5, 1e-15);
    // marginalizing the exact table gives the same law
    JointLaw m = exactFdd(spec).pushforward({"U"}, {{1, 2}});
    EXPECT_LT(totalVariation(law, m), 1e-15);
}

TEST(JointOverIncrements, RepresentationIndependence) {
    auto g = GroundGrid::make({4, 4});
    auto lat = sixSetLattice(g);
    auto spec = empiricalSpec(2, lat);
    auto m = sixSetMembers(g);
    // the same set A5 \ A1 written two ways
    CRepresentation r1{{{m[4], {m[0]}}}};
    CRepresentation r2{{{m[1], {m[0]}}, {m[3], {m[0]}}, {m[4], {m[1], m[3]}}}};
    ASSERT_EQ(r1.set(), r2.set());
    std::vector<CRepresentation> t1{r1};
    std::vector<CRepresentation> t2{r2};
    EXPECT_LT(totalVariation(jointOverIncrements(spec, t1), jointOverIncrements(spec, t2)), 1e-12);
}

TEST(JointOverIncrements, KolmogorovConsistency) {
    auto g = GroundGrid::make({4, 4});
    auto lat = sixSetLattice(g);
    auto spec = empiricalSpec(2, lat);
    const auto& nb = spec.neighbourhoods();
    std::vector<IndexedSet> t{nb.at(1) | nb.at(2), nb.at(3), nb.at(4) | nb.at(5)};
    std::vector<IndexedSet> swapped{t[2], t[0], t[1]};
    JointLaw a = jointOverIncrements(spec, t);
    JointLaw b = jointOverIncrements(spec, swapped);
    std::vector<std::size_t> perm{1, 2, 0};
    JointLaw bPerm = b.marginal(perm);
    bPerm.variables = a.variables;
    EXPECT_LT(totalVariation(a, bPerm), 1e-15);
    std::vector<IndexedSet> extended{t[0], t[1], t[2], nb.at(0)};
    std::vector<std::size_t> first3{0, 1, 2};
    JointLaw c = jointOverIncrements(spec, extended).marginal(first3);
    c.variables = a.variables;
    EXPECT_LT(totalVariation(a, c), 1e-15);
}

TEST(JointOverIncrements, NotExpressible) {
    auto g = GroundGrid::make({2, 2});
    auto spec = empiricalSpec(1, threeSetLattice(g));
    std::vector<IndexedSet> bad{IndexedSet::fromCells(g, {3})};
    EXPECT_THROW(jointOverIncrements(spec, bad), DecompositionError);
}
