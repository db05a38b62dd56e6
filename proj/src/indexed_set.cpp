#include "setmarkov/indexed_set.hpp"

#include <sstream>

#include "setmarkov/error.hpp"
#include "setmarkov/grid.hpp"

namespace setmarkov {

IndexedSet::IndexedSet(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) {
        throw ConfigurationError("IndexedSet requires a grid");
    }
    cells_.resize(grid_->cellCount());
}

IndexedSet::IndexedSet(GridPtr grid, Mask cells, bool lowerLayer)
    : grid_(std::move(grid)), cells_(std::move(cells)), lowerLayer_(lowerLayer) {
    if (!grid_) {
        throw ConfigurationError("IndexedSet requires a grid");
    }
    if (cells_.size() != grid_->cellCount()) {
        throw ConfigurationError("cell mask size does not match the grid");
    }
}

IndexedSet IndexedSet::fromCells(GridPtr grid, std::span<const std::size_t> cells) {
    IndexedSet s(std::move(grid));
    for (std::size_t c : cells) {
        if (c >= s.cells_.size()) {
            throw ConfigurationError("cell index " + std::to_string(c) + " outside the grid");
        }
        s.cells_.set(c);
    }
    return s;
}

IndexedSet IndexedSet::fromCells(GridPtr grid, std::initializer_list<std::size_t> cells) {
    return fromCells(std::move(grid), std::span<const std::size_t>(cells.begin(), cells.size()));
}

IndexedSet IndexedSet::rectangle(GridPtr grid, std::span<const std::size_t> corner) {
    IndexedSet s(grid);
    if (corner.size() != grid->dims()) {
        throw ConfigurationError("rectangle corner has the wrong number of coordinates");
    }
    for (std::size_t axis = 0; axis < corner.size(); ++axis) {
        if (corner[axis] >= grid->extents()[axis]) {
            throw ConfigurationError("rectangle corner outside the grid");
        }
    }
    for (std::size_t c = 0; c < grid->cellCount(); ++c) {
        auto coords = grid->coordinates(c);
        bool inside = true;
        for (std::size_t axis = 0; axis < coords.size() && inside; ++axis) {
            inside = coords[axis] <= corner[axis];
        }
        if (inside) {
            s.cells_.set(c);
        }
    }
    s.lowerLayer_ = true;
    return s;
}

IndexedSet IndexedSet::lowerLayer(GridPtr grid, const std::vector<std::vector<std::size_t>>& corners) {
    if (corners.empty()) {
        throw ConfigurationError("a lower layer needs at least one corner");
    }
    IndexedSet s(grid);
    for (const auto& corner : corners) {
        s.cells_ |= rectangle(grid, corner).cells_;
    }
    s.lowerLayer_ = true;
    return s;
}

IndexedSet IndexedSet::full(GridPtr grid) {
    IndexedSet s(std::move(grid));
    s.cells_.set();
    s.lowerLayer_ = true;
    return s;
}

bool IndexedSet::isLowerLayer() const {
    for (auto c = cells_.find_first(); c != Mask::npos; c = cells_.find_next(c)) {
        auto coords = grid_->coordinates(c);
        // checking the immediate lower neighbours on each axis is enough by induction
        for (std::size_t axis = 0; axis < coords.size(); ++axis) {
            if (coords[axis] == 0) {
                continue;
            }
            auto below = coords;
            --below[axis];
            if (!cells_.test(grid_->index(below))) {
                return false;
            }
        }
    }
    return true;
}

std::vector<std::size_t> IndexedSet::cells() const {
    std::vector<std::size_t> out;
    out.reserve(cells_.count());
    for (auto c = cells_.find_first(); c != Mask::npos; c = cells_.find_next(c)) {
        out.push_back(c);
    }
    return out;
}

bool IndexedSet::sameGrid(const IndexedSet& other) const {
    return grid_ == other.grid_ || *grid_ == *other.grid_;
}

void IndexedSet::requireSameGrid(const IndexedSet& other) const {
    if (!sameGrid(other)) {
        throw ConfigurationError("sets live on different grids");
    }
}

bool IndexedSet::subsetOf(const IndexedSet& other) const {
    requireSameGrid(other);
    return cells_.is_subset_of(other.cells_);
}

bool IndexedSet::intersects(const IndexedSet& other) const {
    requireSameGrid(other);
    return cells_.intersects(other.cells_);
}

IndexedSet IndexedSet::operator&(const IndexedSet& other) const {
    requireSameGrid(other);
    return IndexedSet(grid_, cells_ & other.cells_, lowerLayer_ && other.lowerLayer_);
}

IndexedSet IndexedSet::operator|(const IndexedSet& other) const {
    requireSameGrid(other);
    return IndexedSet(grid_, cells_ | other.cells_, lowerLayer_ && other.lowerLayer_);
}

IndexedSet IndexedSet::operator-(const IndexedSet& other) const {
    requireSameGrid(other);
    return IndexedSet(grid_, cells_ - other.cells_, false);
}

IndexedSet IndexedSet::complement() const {
    return IndexedSet(grid_, ~cells_, false);
}

std::strong_ordering IndexedSet::operator<=>(const IndexedSet& other) const {
    if (auto c = cells_.count() <=> other.cells_.count(); c != 0) {
        return c;
    }
    if (cells_ < other.cells_) {
        return std::strong_ordering::less;
    }
    if (other.cells_ < cells_) {
        return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

std::string IndexedSet::toString() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (auto c = cells_.find_first(); c != Mask::npos; c = cells_.find_next(c)) {
        if (!first) {
            os << ',';
        }
        os << c;
        first = false;
    }
    os << '}';
    return os.str();
}

IndexedSet unionOf(std::span<const IndexedSet> sets, const GridPtr& grid) {
    IndexedSet out(grid);
    for (const auto& s : sets) {
        out = IndexedSet(grid, out.mask() | s.mask(), false);
    }
    return out;
}

} // namespace setmarkov
