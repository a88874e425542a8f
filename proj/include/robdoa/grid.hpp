#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robdoa/errors.hpp"

namespace robdoa {

/// Axis-aligned box with lower < upper per dimension.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  static Box make(std::vector<double> lo, std::vector<double> hi);

  int dim() const { return static_cast<int>(lower.size()); }
  double volume() const;
  bool contains(std::span<const double> p) const;
  /// True when 0 lies strictly inside every dimension. Interested regions
  /// must satisfy this; sampled boxes in general need not.
  bool contains_origin_interior() const;
  /// All 2^dim corner points.
  std::vector<std::vector<double>> corners() const;
};

/// Uniform axis-aligned partition of a box into prod(counts) half-open cells
/// [low, high); the global upper face belongs to the last cell. Flat cell
/// indices are row-major with dimension 0 slowest, so for a product grid
/// built as state x control the state index is the major one.
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(Box box, std::vector<std::size_t> counts);

  const Box& box() const { return box_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  const std::vector<double>& widths() const { return widths_; }
  int dim() const { return box_.dim(); }
  std::size_t cell_count() const { return cell_count_; }
  double cell_volume() const { return cell_volume_; }

  /// Flat index of the cell containing `p`, or nullopt outside the box.
  std::optional<std::size_t> locate(std::span<const double> p) const;

  std::size_t flatten(std::span<const std::size_t> multi) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;

  void cell_bounds(std::size_t flat, std::span<double> lo,
                   std::span<double> hi) const;
  std::vector<double> cell_center(std::size_t flat) const;

  /// True when the cell touches the outer face of the box in any dimension.
  bool is_boundary_cell(std::size_t flat) const;

  /// Cells whose closure contains the origin: normally one per dimension,
  /// two when 0 sits on an interior cell face (detected with a relative
  /// tolerance of 1e-9 cell widths). Errors when the origin is outside.
  std::vector<std::size_t> origin_cells() const;

  bool operator==(const UniformGrid& other) const;
  bool operator!=(const UniformGrid& other) const { return !(*this == other); }

 private:
  Box box_;
  std::vector<std::size_t> counts_;
  std::vector<double> widths_;
  std::size_t cell_count_ = 0;
  double cell_volume_ = 0.0;
};

/// Grid over the concatenated space of `gx` and `gu`; flat index is
/// x_flat * gu.cell_count() + u_flat.
UniformGrid product_grid(const UniformGrid& gx, const UniformGrid& gu);

/// One bit per grid cell.
class CellMask {
 public:
  CellMask() = default;
  explicit CellMask(UniformGrid grid);

  const UniformGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.cell_count(); }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool v = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }

  std::size_t count() const;
  bool any() const { return count() > 0; }
  bool none() const { return count() == 0; }

  /// Lebesgue measure: set cells times cell volume.
  double volume() const { return static_cast<double>(count()) * grid_.cell_volume(); }

  std::vector<std::size_t> set_indices() const;

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

 private:
  UniformGrid grid_;
  std::vector<std::uint64_t> words_;
};

/// Elementwise AND / OR; grids must match.
CellMask mask_and(const CellMask& a, const CellMask& b);
CellMask mask_or(const CellMask& a, const CellMask& b);
bool mask_eq(const CellMask& a, const CellMask& b);
/// a is contained in b, i.e. mask_and(a, b) == a.
bool mask_subset(const CellMask& a, const CellMask& b);
/// Any set cell on the outer boundary of the grid.
bool mask_touches_boundary(const CellMask& m);

/// Collapses a product-grid mask onto the state grid: a state cell is set
/// iff some control cell makes the product cell set.
CellMask project_mask(const CellMask& w_mask, const UniformGrid& gx,
                      const UniformGrid& gu);

}  // namespace robdoa
