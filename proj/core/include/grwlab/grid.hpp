#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace grwlab {

/// Uniform rectangular grid over a box of the flat fiber R^n, n in {2, 3}.
///
/// Nodes are stored with axis 0 fastest: index = i0 + N0 * (i1 + N1 * i2).
/// Depth of a node is its index distance to the nearest boundary face;
/// boundary nodes have depth 0 and carry Dirichlet data only.
class Grid {
 public:
  static constexpr int kMaxDim = 3;
  using Index = std::array<int, kMaxDim>;

  /// Throws ParameterError unless dim in {2,3}, nodes >= 5 and lower < upper
  /// on every axis.
  Grid(int dim, std::array<double, kMaxDim> lower, std::array<double, kMaxDim> upper,
       std::array<int, kMaxDim> nodes);

  /// Same extent and node count on every axis.
  static Grid cube(int dim, double lower, double upper, int nodes);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return size_; }
  int nodes(int axis) const { return nodes_[static_cast<std::size_t>(axis)]; }
  double lower(int axis) const { return lower_[static_cast<std::size_t>(axis)]; }
  double upper(int axis) const { return upper_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
  double max_spacing() const;
  /// Linear offset to the neighbour one step along `axis`.
  std::size_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }

  std::size_t linear(const Index& idx) const;
  Index unravel(std::size_t linear) const;
  double coordinate(std::size_t linear, int axis) const;
  int depth(std::size_t linear) const;
  bool is_boundary(std::size_t linear) const { return depth(linear) == 0; }

  /// Node linear indices of at least the given depth, in storage order.
  std::vector<std::size_t> nodes_with_depth(int min_depth) const;

  /// Same grid shifted by a fiber vector.
  Grid translated(const std::array<double, kMaxDim>& offset) const;

  std::string describe() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_;
  std::array<double, kMaxDim> lower_{};
  std::array<double, kMaxDim> upper_{};
  std::array<int, kMaxDim> nodes_{1, 1, 1};
  std::array<double, kMaxDim> spacing_{};
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t size_ = 0;
};

/// Node field valid only from a given depth inward; other entries are NaN.
/// Stencil outputs carry their valid depth so callers never read
/// extrapolated values.
struct MaskedField {
  std::vector<double> values;
  int min_depth = 0;

  bool valid(const Grid& grid, std::size_t linear) const {
    return grid.depth(linear) >= min_depth;
  }
  static MaskedField nan(std::size_t size, int depth) {
    return {std::vector<double>(size, std::numeric_limits<double>::quiet_NaN()), depth};
  }
};

}  // namespace grwlab
