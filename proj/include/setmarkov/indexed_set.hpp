#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace setmarkov {

class GroundGrid;
using GridPtr = std::shared_ptr<const GroundGrid>;

/// A finite union of grid cells, i.e. a member of A, A(u), C or C(u) on a discretized carrier.
///
/// The lower-layer flag is set by the lower-layer factories and propagated through
/// intersections and unions. It is never inferred; call isLowerLayer() to check the
/// geometric property explicitly.
class IndexedSet {
public:
    using Mask = boost::dynamic_bitset<std::uint64_t>;

    explicit IndexedSet(GridPtr grid);
    IndexedSet(GridPtr grid, Mask cells, bool lowerLayer = false);

    static IndexedSet fromCells(GridPtr grid, std::span<const std::size_t> cells);
    static IndexedSet fromCells(GridPtr grid, std::initializer_list<std::size_t> cells);
    /// The rectangle [0, corner] (all cells with coordinates <= corner componentwise).
    static IndexedSet rectangle(GridPtr grid, std::span<const std::size_t> corner);
    /// Union of the rectangles [0, corner_k].
    static IndexedSet lowerLayer(GridPtr grid, const std::vector<std::vector<std::size_t>>& corners);
    static IndexedSet full(GridPtr grid);

    const GridPtr& grid() const { return grid_; }
    const Mask& mask() const { return cells_; }
    bool lowerLayerFlag() const { return lowerLayer_; }
    /// Checks the lower-layer property directly against the grid geometry.
    bool isLowerLayer() const;

    bool empty() const { return cells_.none(); }
    std::size_t count() const { return cells_.count(); }
    bool contains(std::size_t cell) const { return cells_.test(cell); }
    std::vector<std::size_t> cells() const;

    bool subsetOf(const IndexedSet& other) const;
    bool intersects(const IndexedSet& other) const;
    bool sameGrid(const IndexedSet& other) const;

    IndexedSet operator&(const IndexedSet& other) const;
    IndexedSet operator|(const IndexedSet& other) const;
    IndexedSet operator-(const IndexedSet& other) const;
    IndexedSet complement() const;

    bool operator==(const IndexedSet& other) const { return cells_ == other.cells_; }
    /// Orders by cell count, then by mask value (highest cell index most significant).
    std::strong_ordering operator<=>(const IndexedSet& other) const;

    /// "{0,2,5}"
    std::string toString() const;

private:
    void requireSameGrid(const IndexedSet& other) const;

    GridPtr grid_;
    Mask cells_;
    bool lowerLayer_ = false;
};

IndexedSet unionOf(std::span<const IndexedSet> sets, const GridPtr& grid);

} // namespace setmarkov
