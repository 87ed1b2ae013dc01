#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace thinfilm {

/// Nodal coefficients of a piecewise-linear function, one scalar unknown at one
/// time level.
using Field = std::vector<double>;

/// Uniform 1D mesh on [0, length] with piecewise-linear (P1) nodal basis.
class Mesh {
 public:
  Mesh(double length, int n_nodes) : length_(length), n_nodes_(n_nodes) {
    if (!std::isfinite(length) || length <= 0.0) {
      throw std::invalid_argument("Mesh: length must be positive and finite");
    }
    if (n_nodes < 3) {
      throw std::invalid_argument("Mesh: at least 3 nodes required");
    }
    dx_ = length_ / static_cast<double>(n_nodes_ - 1);
  }

  double length() const { return length_; }
  int n_nodes() const { return n_nodes_; }
  int n_elements() const { return n_nodes_ - 1; }
  double dx() const { return dx_; }

  double node(int i) const {
    return i == n_nodes_ - 1 ? length_ : static_cast<double>(i) * dx_;
  }

 private:
  double length_;
  int n_nodes_;
  double dx_;
};

/// Nodal values on a full time grid: (n_steps + 1) levels by n_nodes, row-major
/// in the level index. Used for controls and stored trajectories.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(int n_levels, int n_nodes)
      : levels_(n_levels),
        nodes_(n_nodes),
        data_(static_cast<std::size_t>(n_levels) * n_nodes, 0.0) {}

  int n_levels() const { return levels_; }
  int n_nodes() const { return nodes_; }

  std::span<double> level(int k) {
    return {data_.data() + static_cast<std::size_t>(k) * nodes_,
            static_cast<std::size_t>(nodes_)};
  }
  std::span<const double> level(int k) const {
    return {data_.data() + static_cast<std::size_t>(k) * nodes_,
            static_cast<std::size_t>(nodes_)};
  }

  double& at(int k, int i) {
    return data_[static_cast<std::size_t>(k) * nodes_ + i];
  }
  double at(int k, int i) const {
    return data_[static_cast<std::size_t>(k) * nodes_ + i];
  }

  void assign_level(int k, std::span<const double> values) {
    auto row = level(k);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = values[i];
  }

 private:
  int levels_ = 0;
  int nodes_ = 0;
  std::vector<double> data_;
};

inline double linf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double linf_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline Field constant_field(int n, double value) {
  return Field(static_cast<std::size_t>(n), value);
}

}  // namespace thinfilm
