#include <gtest/gtest.h>

#include <random>

#include "setmarkov/error.hpp"
#include "setmarkov/semilattice.hpp"
#include "test_util.hpp"

using namespace setmarkov;
using namespace setmarkov::testing;

namespace {

std::vector<std::vector<std::size_t>> orders(const std::vector<ConsistentOrdering>& ords) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& o : ords) {
        out.push_back(o.order());
    }
    return out;
}

} // namespace

TEST(Closure, OnePairwiseIntersection) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    ASSERT_EQ(lat->size(), 3u);
    EXPECT_EQ(lat->member(0), IndexedSet::fromCells(g, {0}));
    EXPECT_EQ(lat->member(1), IndexedSet::fromCells(g, {0, 1}));
    EXPECT_EQ(lat->member(2), IndexedSet::fromCells(g, {0, 2}));
    EXPECT_EQ(lat->minSet(), IndexedSet::fromCells(g, {0}));
}

TEST(Closure, Singleton) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> gens{IndexedSet::fromCells(g, {0})};
    auto lat = makeLattice(gens);
    ASSERT_EQ(lat->size(), 1u);
    EXPECT_EQ(lat->minSet(), gens[0]);
}

TEST(Closure, EmptyBottomRejected) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> gens{IndexedSet::fromCells(g, {0}), IndexedSet::fromCells(g, {1})};
    EXPECT_THROW(makeLattice(gens), ConfigurationError);
}

TEST(Closure, StaircaseMatchesFixedPoint) {
    auto g = GroundGrid::make({4, 4});
    auto members = sixSetMembers(g);
    auto lat = makeLattice(members);
    auto oracle = fixedPointClosure(members);
    ASSERT_EQ(lat->size(), oracle.size());
    for (const auto& s : oracle) {
        EXPECT_TRUE(lat->indexOf(s).has_value()) << s.toString();
    }
}

TEST(Closure, RandomMatchesFixedPoint) {
    auto g = GroundGrid::make({3, 3});
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> cell(1, 8);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<IndexedSet> gens;
        for (int k = 0; k < 4; ++k) {
            gens.push_back(IndexedSet::fromCells(g, {0, cell(rng), cell(rng), cell(rng)}));
        }
        auto lat = makeLattice(gens);
        auto oracle = fixedPointClosure(gens);
        ASSERT_EQ(lat->size(), oracle.size());
        for (std::size_t i = 0; i < lat->size(); ++i) {
            EXPECT_TRUE(oracle.count(lat->member(i)));
            if (i > 0) {
                EXPECT_TRUE(lat->member(i - 1) < lat->member(i));
            }
        }
    }
}

TEST(Semilattice, RejectsNonClosedFamily) {
    auto g = GroundGrid::make({2, 2});
    EXPECT_THROW(Semilattice({IndexedSet::fromCells(g, {0, 1}), IndexedSet::fromCells(g, {0, 2})}),
                 ConfigurationError);
}

TEST(Orderings, Chain) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> gens{IndexedSet::fromCells(g, {0}), IndexedSet::fromCells(g, {0, 1}),
                                 IndexedSet::fromCells(g, {0, 1, 2})};
    auto ords = enumerateConsistentOrderings(makeLattice(gens));
    EXPECT_EQ(ords.size(), 1u);
}

TEST(Orderings, TwoIncomparable) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    auto ords = enumerateConsistentOrderings(lat);
    EXPECT_EQ(orders(ords), bruteForceOrderings(*lat));
    EXPECT_EQ(ords.size(), 2u);
}

TEST(Orderings, ThreeIncomparable) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> gens{IndexedSet::fromCells(g, {0, 1}), IndexedSet::fromCells(g, {0, 2}),
                                 IndexedSet::fromCells(g, {0, 3})};
    auto lat = makeLattice(gens);
    auto ords = enumerateConsistentOrderings(lat);
    EXPECT_EQ(orders(ords), bruteForceOrderings(*lat));
    EXPECT_EQ(ords.size(), 6u);
}

TEST(Orderings, RandomMatchBruteForce) {
    std::mt19937_64 rng(3);
    auto g = GroundGrid::make({4, 4});
    for (int trial = 0; trial < 25; ++trial) {
        auto lat = randomLattice(rng, g, 7);
        EXPECT_EQ(orders(enumerateConsistentOrderings(lat)), bruteForceOrderings(*lat));
    }
}

TEST(Orderings, CapOverflow) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> gens{IndexedSet::fromCells(g, {0, 1}), IndexedSet::fromCells(g, {0, 2}),
                                 IndexedSet::fromCells(g, {0, 3})};
    EXPECT_THROW(enumerateConsistentOrderings(makeLattice(gens), 5), CapacityError);
}

TEST(Orderings, ValidationRejectsSupersetFirst) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> gens{IndexedSet::fromCells(g, {0}), IndexedSet::fromCells(g, {0, 1}),
                                 IndexedSet::fromCells(g, {0, 1, 2})};
    auto lat = makeLattice(gens);
    EXPECT_THROW(ConsistentOrdering(lat, {0, 2, 1}), ConfigurationError);
    EXPECT_THROW(ConsistentOrdering(lat, {1, 0, 2}), ConfigurationError);
    EXPECT_THROW(ConsistentOrdering(lat, {0, 1}), ConfigurationError);
}

TEST(LeftNeighbourhoods, ThreeSet) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    auto nb = leftNeighbourhoods(ConsistentOrdering::canonical(lat));
    ASSERT_EQ(nb.size(), 3u);
    // A_i minus the earlier members, by explicit set differences
    EXPECT_EQ(nb.at(0), lat->member(0));
    EXPECT_EQ(nb.at(1), lat->member(1) - lat->member(0));
    EXPECT_EQ(nb.at(2), lat->member(2) - (lat->member(0) | lat->member(1)));
    EXPECT_EQ(nb.at(1), IndexedSet::fromCells(g, {1}));
    EXPECT_EQ(nb.at(2), IndexedSet::fromCells(g, {2}));
}

TEST(LeftNeighbourhoods, ChainDifferences) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> gens{IndexedSet::fromCells(g, {0}), IndexedSet::fromCells(g, {0, 1}),
                                 IndexedSet::fromCells(g, {0, 1, 2})};
    auto lat = makeLattice(gens);
    auto nb = leftNeighbourhoods(ConsistentOrdering::canonical(lat));
    for (std::size_t i = 1; i < nb.size(); ++i) {
        EXPECT_EQ(nb.at(i), lat->member(i) - lat->member(i - 1));
    }
}

TEST(LeftNeighbourhoods, OrderingIndependentMultiset) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    std::vector<std::vector<IndexedSet>> byOrdering;
    for (const auto& ord : enumerateConsistentOrderings(lat)) {
        auto nb = leftNeighbourhoods(ord);
        std::vector<IndexedSet> sets = nb.sets();
        std::sort(sets.begin(), sets.end());
        byOrdering.push_back(sets);
    }
    ASSERT_EQ(byOrdering.size(), 2u);
    EXPECT_EQ(byOrdering[0], byOrdering[1]);
}

TEST(LeftNeighbourhoods, PartitionAndOrderingFreeFormula) {
    std::mt19937_64 rng(5);
    auto g = GroundGrid::make({4, 4});
    std::vector<LatticePtr> lattices{sixSetLattice(g)};
    for (int trial = 0; trial < 15; ++trial) {
        lattices.push_back(randomLattice(rng, g, 7));
    }
    for (const auto& lat : lattices) {
        IndexedSet all = lat->unionOfMembers();
        for (const auto& ord : enumerateConsistentOrderings(lat)) {
            auto nb = leftNeighbourhoods(ord);
            std::size_t total = 0;
            IndexedSet acc(g);
            for (std::size_t i = 0; i < nb.size(); ++i) {
                total += nb.at(i).count();
                if (i >= 1) {
                    EXPECT_FALSE(nb.at(i).intersects(acc));
                }
                acc = acc | nb.at(i);
                EXPECT_EQ(acc, ord.prefixUnion(i));
                EXPECT_EQ(nb.at(i), leftNeighbourhoodOf(*lat, ord.memberAt(i)));
            }
            EXPECT_EQ(total, all.count());
        }
    }
}

TEST(LeftNeighbourhoods, DecomposeNamesCells) {
    auto g = GroundGrid::make({2, 2});
    auto nb = leftNeighbourhoods(ConsistentOrdering::canonical(threeSetLattice(g)));
    auto idx = nb.decompose(IndexedSet::fromCells(g, {1, 2}));
    EXPECT_EQ(idx, (std::vector<std::size_t>{1, 2}));
    try {
        nb.decompose(IndexedSet::fromCells(g, {3}));
        FAIL();
    } catch (const DecompositionError& e) {
        EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
    }
}

namespace {

bool irredundant(const std::vector<IndexedSet>& parts, const GridPtr& g) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
        IndexedSet others(g);
        for (std::size_t j = 0; j < parts.size(); ++j) {
            if (j != i) {
                others = others | parts[j];
            }
        }
        if (parts[i].subsetOf(others)) {
            return false;
        }
    }
    return true;
}

/// Smallest subfamily with the same union, by exhaustive search.
std::size_t minimalCoverSize(const std::vector<IndexedSet>& parts, const GridPtr& g) {
    IndexedSet target = unionOf(parts, g);
    std::size_t best = parts.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << parts.size()); ++mask) {
        IndexedSet u(g);
        std::size_t k = 0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (mask >> i & 1U) {
                u = u | parts[i];
                ++k;
            }
        }
        if (u == target) {
            best = std::min(best, k);
        }
    }
    return best;
}

} // namespace

TEST(Extremal, Nested) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> parts{IndexedSet::fromCells(g, {0}), IndexedSet::fromCells(g, {0, 1})};
    EXPECT_EQ(extremalRepresentation(parts), std::vector<IndexedSet>{parts[1]});
}

TEST(Extremal, Incomparable) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> parts{IndexedSet::fromCells(g, {0, 1}), IndexedSet::fromCells(g, {0, 2})};
    EXPECT_EQ(extremalRepresentation(parts), parts);
}

TEST(Extremal, GreedyMatchesExhaustive) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> parts{IndexedSet::fromCells(g, {0, 1}), IndexedSet::fromCells(g, {0, 2}),
                                  IndexedSet::fromCells(g, {0})};
    auto rep = extremalRepresentation(parts);
    EXPECT_EQ(rep, (std::vector<IndexedSet>{parts[0], parts[1]}));
    EXPECT_EQ(rep.size(), minimalCoverSize(parts, g));
}

TEST(Extremal, RandomIrredundant) {
    auto g = GroundGrid::make({3, 3});
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> cell(0, 8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<IndexedSet> parts;
        for (int k = 0; k < 5; ++k) {
            parts.push_back(IndexedSet::fromCells(g, {cell(rng), cell(rng), cell(rng)}));
        }
        auto rep = extremalRepresentation(parts);
        EXPECT_EQ(unionOf(rep, g), unionOf(parts, g));
        EXPECT_TRUE(irredundant(rep, g));
        EXPECT_GE(rep.size(), minimalCoverSize(parts, g));
    }
    EXPECT_TRUE(extremalRepresentation(std::vector<IndexedSet>{}).empty());
}

TEST(EmbedChain, ThreeSet) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    std::vector<IndexedSet> chain{IndexedSet::fromCells(g, {0}), IndexedSet::fromCells(g, {0, 1, 2})};
    auto e = embedChain(chain, lat);
    EXPECT_EQ(e.prefixIndices, (std::vector<std::size_t>{0, 2}));
    for (std::size_t l = 0; l < chain.size(); ++l) {
        EXPECT_EQ(e.ordering.prefixUnion(e.prefixIndices[l]), chain[l]);
    }
    auto all = orders(enumerateConsistentOrderings(lat));
    EXPECT_NE(std::find(all.begin(), all.end(), e.ordering.order()), all.end());
}

TEST(EmbedChain, MiddleSetPicksOrdering) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    std::vector<IndexedSet> chain{IndexedSet::fromCells(g, {0, 2}), IndexedSet::fromCells(g, {0, 1, 2})};
    auto e = embedChain(chain, lat);
    EXPECT_EQ(e.ordering.prefixUnion(e.prefixIndices[0]), chain[0]);
    EXPECT_EQ(e.prefixIndices[1], 2u);
}

TEST(EmbedChain, TrivialChains) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    std::vector<IndexedSet> top{lat->unionOfMembers()};
    EXPECT_EQ(embedChain(top, lat).prefixIndices, std::vector<std::size_t>{2});
    std::vector<IndexedSet> bottom{lat->minSet()};
    EXPECT_EQ(embedChain(bottom, lat).prefixIndices, std::vector<std::size_t>{0});
}

TEST(EmbedChain, Errors) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    std::vector<IndexedSet> notMonotone{IndexedSet::fromCells(g, {0, 1}), IndexedSet::fromCells(g, {0, 2})};
    EXPECT_THROW(embedChain(notMonotone, lat), ConfigurationError);
    std::vector<IndexedSet> notUnion{IndexedSet::fromCells(g, {0, 3})};
    EXPECT_THROW(embedChain(notUnion, lat), ConfigurationError);
}

TEST(Flow, FromOrdering) {
    auto g = GroundGrid::make({2, 2});
    auto lat = threeSetLattice(g);
    auto F = CellMeasure::uniformProbability(g);
    auto flow = flowFromOrdering(ConsistentOrdering::canonical(lat), F);
    ASSERT_EQ(flow.knots(), 3u);
    EXPECT_EQ(flow.stages()[1], IndexedSet::fromCells(g, {0, 1}));
    EXPECT_EQ(flow.stages()[2], IndexedSet::fromCells(g, {0, 1, 2}));
    std::vector<double> expect;
    for (const auto& s : flow.stages()) {
        expect.push_back(F.measureOf(s));
    }
    EXPECT_EQ(flow.traceValues(), expect);
    EXPECT_DOUBLE_EQ(flow.traceValues()[0], 0.25);
    EXPECT_DOUBLE_EQ(flow.traceValues()[2], 0.75);
    EXPECT_DOUBLE_EQ(flow.trace(0.5), 0.375);
}

TEST(Flow, SingleMember) {
    auto g = GroundGrid::make({2, 2});
    std::vector<IndexedSet> gens{IndexedSet::fromCells(g, {0})};
    auto flow = flowFromOrdering(ConsistentOrdering::canonical(makeLattice(gens)), CellMeasure::uniformProbability(g));
    EXPECT_EQ(flow.knots(), 1u);
    EXPECT_DOUBLE_EQ(flow.trace(0.0), 0.25);
}

TEST(Flow, MonotoneTraces) {
    auto g = GroundGrid::make({4, 4});
    auto lat = sixSetLattice(g);
    auto F = CellMeasure::uniformProbability(g);
    for (const auto& ord : enumerateConsistentOrderings(lat)) {
        auto flow = flowFromOrdering(ord, F);
        for (std::size_t k = 1; k < flow.knots(); ++k) {
            EXPECT_TRUE(flow.stages()[k - 1].subsetOf(flow.stages()[k]));
        }
        double prev = flow.trace(0.0);
        for (double t = 0.0; t <= 5.0; t += 0.125) {
            EXPECT_GE(flow.trace(t), prev - 1e-15);
            prev = flow.trace(t);
        }
    }
    EXPECT_THROW(DiscreteFlow({0.0, 1.0}, {lat->member(1), lat->member(0)}), ConfigurationError);
}

TEST(Flow, SixSetSwappedOrderingIsConsistent) {
    auto g = GroundGrid::make({4, 4});
    auto lat = sixSetLattice(g);
    EXPECT_EQ(lat->size(), 6u);
    auto all = orders(enumerateConsistentOrderings(lat));
    auto swapped = sixSetSwapped(lat);
    EXPECT_NE(std::find(all.begin(), all.end(), swapped.order()), all.end());
}
