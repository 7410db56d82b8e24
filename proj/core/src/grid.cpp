#include "grwlab/grid.hpp"

#include <algorithm>
#include <sstream>

#include "grwlab/errors.hpp"

namespace grwlab {

Grid::Grid(int dim, std::array<double, kMaxDim> lower, std::array<double, kMaxDim> upper,
           std::array<int, kMaxDim> nodes)
    : dim_(dim) {
  if (dim != 2 && dim != 3) {
    throw ParameterError("grid dimension must be 2 or 3, got " + std::to_string(dim));
  }
  std::size_t stride = 1;
  for (int a = 0; a < kMaxDim; ++a) {
    const auto i = static_cast<std::size_t>(a);
    if (a < dim) {
      if (nodes[i] < 5) {
        throw ParameterError("grid needs >= 5 nodes per axis, axis " + std::to_string(a) +
                             " has " + std::to_string(nodes[i]));
      }
      if (!(lower[i] < upper[i])) {
        throw ParameterError("grid axis " + std::to_string(a) + " has empty extent");
      }
      lower_[i] = lower[i];
      upper_[i] = upper[i];
      nodes_[i] = nodes[i];
      spacing_[i] = (upper[i] - lower[i]) / (nodes[i] - 1);
    }
    stride_[i] = stride;
    stride *= static_cast<std::size_t>(nodes_[i]);
  }
  size_ = stride;
}

Grid Grid::cube(int dim, double lower, double upper, int nodes) {
  return Grid(dim, {lower, lower, lower}, {upper, upper, upper}, {nodes, nodes, nodes});
}

double Grid::max_spacing() const {
  return *std::max_element(spacing_.begin(), spacing_.begin() + dim_);
}

std::size_t Grid::linear(const Index& idx) const {
  std::size_t out = 0;
  for (int a = 0; a < dim_; ++a) {
    out += static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]) * stride(a);
  }
  return out;
}

Grid::Index Grid::unravel(std::size_t linear) const {
  Index idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    const auto n = static_cast<std::size_t>(nodes_[static_cast<std::size_t>(a)]);
    idx[static_cast<std::size_t>(a)] = static_cast<int>(linear % n);
    linear /= n;
  }
  return idx;
}

double Grid::coordinate(std::size_t linear, int axis) const {
  const auto idx = unravel(linear);
  const auto a = static_cast<std::size_t>(axis);
  // Exact endpoints so translated grids and boundary data agree bitwise.
  if (idx[a] == nodes_[a] - 1) return upper_[a];
  return lower_[a] + spacing_[a] * idx[a];
}

int Grid::depth(std::size_t linear) const {
  const auto idx = unravel(linear);
  int d = nodes_[0];
  for (int a = 0; a < dim_; ++a) {
    const auto i = static_cast<std::size_t>(a);
    d = std::min({d, idx[i], nodes_[i] - 1 - idx[i]});
  }
  return d;
}

std::vector<std::size_t> Grid::nodes_with_depth(int min_depth) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size_; ++k) {
    if (depth(k) >= min_depth) out.push_back(k);
  }
  return out;
}

Grid Grid::translated(const std::array<double, kMaxDim>& offset) const {
  std::array<double, kMaxDim> lo = lower_;
  std::array<double, kMaxDim> hi = upper_;
  for (int a = 0; a < dim_; ++a) {
    lo[static_cast<std::size_t>(a)] += offset[static_cast<std::size_t>(a)];
    hi[static_cast<std::size_t>(a)] += offset[static_cast<std::size_t>(a)];
  }
  Grid out(dim_, lo, hi, nodes_);
  out.spacing_ = spacing_;
  return out;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << dim_ << "D grid";
  for (int a = 0; a < dim_; ++a) {
    const auto i = static_cast<std::size_t>(a);
    os << (a == 0 ? " " : " x ") << nodes_[i] << "[" << lower_[i] << "," << upper_[i] << "]";
  }
  return os.str();
}

}  // namespace grwlab
