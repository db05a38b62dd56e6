#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "setmarkov/indexed_set.hpp"

namespace setmarkov {

/// A d-dimensional grid of cells; cell indices are row-major over the extents.
class GroundGrid {
public:
    explicit GroundGrid(std::vector<std::size_t> extents);

    static GridPtr make(std::vector<std::size_t> extents);

    std::size_t dims() const { return extents_.size(); }
    const std::vector<std::size_t>& extents() const { return extents_; }
    std::size_t cellCount() const { return cellCount_; }

    std::vector<std::size_t> coordinates(std::size_t cell) const;
    std::size_t index(std::span<const std::size_t> coords) const;

    bool operator==(const GroundGrid& other) const { return extents_ == other.extents_; }

private:
    std::vector<std::size_t> extents_;
    std::size_t cellCount_ = 0;
};

enum class MeasureKind { intensity, probability, dirichlet };

std::string toString(MeasureKind kind);

/// Nonnegative per-cell weights: an intensity Lambda, a probability F, or a Dirichlet parameter alpha.
class CellMeasure {
public:
    CellMeasure(GridPtr grid, std::vector<double> weights, MeasureKind kind);

    static CellMeasure constant(GridPtr grid, double perCell, MeasureKind kind);
    /// Probability measure putting 1/cellCount on every cell.
    static CellMeasure uniformProbability(GridPtr grid);

    const GridPtr& grid() const { return grid_; }
    const std::vector<double>& weights() const { return weights_; }
    double total() const { return total_; }
    MeasureKind kind() const { return kind_; }

    double measureOf(const IndexedSet& s) const;

private:
    GridPtr grid_;
    std::vector<double> weights_;
    double total_ = 0.0;
    MeasureKind kind_;
};

inline double measureOf(const CellMeasure& m, const IndexedSet& s) { return m.measureOf(s); }

} // namespace setmarkov
