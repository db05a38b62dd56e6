#include <gtest/gtest.h>

#include <random>

#include "setmarkov/error.hpp"
#include "setmarkov/grid.hpp"

using namespace setmarkov;

TEST(Grid, RowMajorCells) {
    auto g = GroundGrid::make({3, 4});
    EXPECT_EQ(g->cellCount(), 12u);
    EXPECT_EQ(g->dims(), 2u);
    std::vector<std::size_t> c{2, 1};
    EXPECT_EQ(g->index(c), 9u);
    EXPECT_EQ(g->coordinates(9), c);
}

TEST(Grid, RejectsBadExtents) {
    EXPECT_THROW(GroundGrid::make({}), ConfigurationError);
    EXPECT_THROW(GroundGrid::make({2, 0}), ConfigurationError);
}

TEST(CellMeasure, UniformTwoCells) {
    auto g = GroundGrid::make({2, 2});
    auto F = CellMeasure::uniformProbability(g);
    EXPECT_DOUBLE_EQ(measureOf(F, IndexedSet::fromCells(g, {0, 1})), 0.5);
}

TEST(CellMeasure, EmptySet) {
    auto g = GroundGrid::make({2, 2});
    CellMeasure m(g, {1, 2, 3, 4}, MeasureKind::intensity);
    EXPECT_EQ(measureOf(m, IndexedSet(g)), 0.0);
}

TEST(CellMeasure, DirectSummation) {
    auto g = GroundGrid::make({2, 2});
    std::vector<double> w{1, 2, 3, 4};
    CellMeasure m(g, w, MeasureKind::intensity);
    double oracle = 0.0;
    for (std::size_t c : {0u, 3u}) {
        oracle += w[c];
    }
    EXPECT_DOUBLE_EQ(measureOf(m, IndexedSet::fromCells(g, {0, 3})), oracle);
    EXPECT_DOUBLE_EQ(m.total(), 10.0);
    EXPECT_DOUBLE_EQ(measureOf(m, IndexedSet::full(g)), m.total());
}

TEST(CellMeasure, Invariants) {
    auto g = GroundGrid::make({2});
    EXPECT_THROW(CellMeasure(g, {-1.0, 2.0}, MeasureKind::intensity), ConfigurationError);
    EXPECT_THROW(CellMeasure(g, {0.5, 0.6}, MeasureKind::probability), ConfigurationError);
    EXPECT_THROW(CellMeasure(g, {0.0, 0.0}, MeasureKind::dirichlet), ConfigurationError);
    EXPECT_THROW(CellMeasure(g, {1.0}, MeasureKind::intensity), ConfigurationError);
    EXPECT_NO_THROW(CellMeasure(g, {0.5, 0.5}, MeasureKind::probability));
}

TEST(CellMeasure, GridMismatch) {
    auto g1 = GroundGrid::make({2, 2});
    auto g2 = GroundGrid::make({2, 3});
    auto m = CellMeasure::uniformProbability(g1);
    EXPECT_THROW(measureOf(m, IndexedSet::fromCells(g2, {0})), ConfigurationError);
    EXPECT_NO_THROW(measureOf(m, IndexedSet::fromCells(GroundGrid::make({2, 2}), {0})));
}

TEST(CellMeasure, Modular) {
    auto g = GroundGrid::make({3, 3});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> w(0.0, 2.0);
    std::vector<double> weights(9);
    for (auto& x : weights) {
        x = w(rng);
    }
    CellMeasure m(g, weights, MeasureKind::intensity);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::size_t> a;
        std::vector<std::size_t> b;
        for (std::size_t c = 0; c < 9; ++c) {
            if (coin(rng)) {
                a.push_back(c);
            }
            if (coin(rng)) {
                b.push_back(c);
            }
        }
        auto s = IndexedSet::fromCells(g, a);
        auto t = IndexedSet::fromCells(g, b);
        EXPECT_NEAR(m.measureOf(s | t) + m.measureOf(s & t), m.measureOf(s) + m.measureOf(t), 1e-12);
    }
}

TEST(IndexedSet, LowerLayers) {
    auto g = GroundGrid::make({3, 3});
    std::vector<std::size_t> corner{1, 1};
    auto r = IndexedSet::rectangle(g, corner);
    EXPECT_EQ(r.count(), 4u);
    EXPECT_TRUE(r.isLowerLayer());
    EXPECT_TRUE(r.lowerLayerFlag());
    auto layer = IndexedSet::lowerLayer(g, {{2, 0}, {0, 2}});
    EXPECT_EQ(layer.count(), 5u);
    EXPECT_TRUE(layer.isLowerLayer());
    EXPECT_FALSE(IndexedSet::fromCells(g, {4}).isLowerLayer());
}
