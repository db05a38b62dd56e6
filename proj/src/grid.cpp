#include "setmarkov/grid.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "setmarkov/error.hpp"

namespace setmarkov {

GroundGrid::GroundGrid(std::vector<std::size_t> extents) : extents_(std::move(extents)) {
    if (extents_.empty()) {
        throw ConfigurationError("grid needs at least one dimension");
    }
    cellCount_ = 1;
    for (std::size_t e : extents_) {
        if (e == 0) {
            throw ConfigurationError("grid extents must be positive");
        }
        cellCount_ *= e;
    }
}

GridPtr GroundGrid::make(std::vector<std::size_t> extents) {
    return std::make_shared<const GroundGrid>(std::move(extents));
}

std::vector<std::size_t> GroundGrid::coordinates(std::size_t cell) const {
    std::vector<std::size_t> coords(extents_.size());
    for (std::size_t axis = extents_.size(); axis-- > 0;) {
        coords[axis] = cell % extents_[axis];
        cell /= extents_[axis];
    }
    return coords;
}

std::size_t GroundGrid::index(std::span<const std::size_t> coords) const {
    if (coords.size() != extents_.size()) {
        throw ConfigurationError("coordinate arity does not match the grid");
    }
    std::size_t idx = 0;
    for (std::size_t axis = 0; axis < coords.size(); ++axis) {
        if (coords[axis] >= extents_[axis]) {
            throw ConfigurationError("coordinate outside the grid");
        }
        idx = idx * extents_[axis] + coords[axis];
    }
    return idx;
}

std::string toString(MeasureKind kind) {
    switch (kind) {
    case MeasureKind::intensity:
        return "intensity";
    case MeasureKind::probability:
        return "probability";
    case MeasureKind::dirichlet:
        return "dirichlet";
    }
    return "unknown";
}

CellMeasure::CellMeasure(GridPtr grid, std::vector<double> weights, MeasureKind kind)
    : grid_(std::move(grid)), weights_(std::move(weights)), kind_(kind) {
    if (!grid_) {
        throw ConfigurationError("measure requires a grid");
    }
    if (weights_.size() != grid_->cellCount()) {
        throw ConfigurationError("measure has " + std::to_string(weights_.size()) + " weights for " +
                                 std::to_string(grid_->cellCount()) + " cells");
    }
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ConfigurationError("measure weights must be finite and nonnegative");
        }
    }
    total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (kind_ == MeasureKind::probability && std::abs(total_ - 1.0) > 1e-12) {
        throw ConfigurationError("probability measure weights sum to " + std::to_string(total_));
    }
    if (kind_ == MeasureKind::dirichlet && !(total_ > 0.0)) {
        throw ConfigurationError("dirichlet parameter measure must have positive total mass");
    }
}

CellMeasure CellMeasure::constant(GridPtr grid, double perCell, MeasureKind kind) {
    const std::size_t n = grid->cellCount();
    return CellMeasure(std::move(grid), std::vector<double>(n, perCell), kind);
}

CellMeasure CellMeasure::uniformProbability(GridPtr grid) {
    const std::size_t n = grid->cellCount();
    return CellMeasure(std::move(grid), std::vector<double>(n, 1.0 / static_cast<double>(n)),
                       MeasureKind::probability);
}

double CellMeasure::measureOf(const IndexedSet& s) const {
    if (!(s.grid() == grid_ || *s.grid() == *grid_)) {
        throw ConfigurationError("set and measure live on different grids");
    }
    double sum = 0.0;
    const auto& mask = s.mask();
    for (auto c = mask.find_first(); c != IndexedSet::Mask::npos; c = mask.find_next(c)) {
        sum += weights_[c];
    }
    return sum;
}

} // namespace setmarkov
