#include "thinfilm/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "thinfilm/errors.hpp"

namespace thinfilm {

BandedMatrix::BandedMatrix(int order, int half_bandwidth)
    : n_(order),
      hbw_(half_bandwidth),
      bands_(static_cast<std::size_t>(order) * (2 * half_bandwidth + 1), 0.0) {
  if (order < 1 || half_bandwidth < 0) {
    throw std::invalid_argument("BandedMatrix: bad dimensions");
  }
}

double BandedMatrix::operator()(int i, int j) const {
  if (j < i - hbw_ || j > i + hbw_) return 0.0;
  return bands_[index(i, j)];
}

std::vector<double> BandedMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - hbw_);
    const int j1 = std::min(n_ - 1, i + hbw_);
    double acc = 0.0;
    for (int j = j0; j <= j1; ++j) acc += bands_[index(i, j)] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> BandedMatrix::apply_transpose(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - hbw_);
    const int j1 = std::min(n_ - 1, i + hbw_);
    for (int j = j0; j <= j1; ++j) y[j] += bands_[index(i, j)] * x[i];
  }
  return y;
}

double BandedMatrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - hbw_);
    const int j1 = std::min(n_ - 1, i + hbw_);
    for (int j = j0; j <= j1; ++j) m = std::max(m, std::abs(bands_[index(i, j)]));
  }
  return m;
}

BandedMatrix BandedMatrix::scaled_sum(double a, const BandedMatrix& A, double b,
                                      const BandedMatrix& B) {
  if (A.n_ != B.n_ || A.hbw_ != B.hbw_) {
    throw std::invalid_argument("BandedMatrix::scaled_sum: shape mismatch");
  }
  BandedMatrix out(A.n_, A.hbw_);
  for (std::size_t k = 0; k < out.bands_.size(); ++k) {
    out.bands_[k] = a * A.bands_[k] + b * B.bands_[k];
  }
  return out;
}

BandedLU::BandedLU(const BandedMatrix& a)
    : n_(a.n_), hbw_(a.hbw_), lu_(a.bands_) {
  const double pivot_floor = 1e-14 * a.max_abs();
  for (int k = 0; k < n_; ++k) {
    const double pivot = lu_[index(k, k)];
    if (std::abs(pivot) <= pivot_floor) {
      throw SingularMatrixError("banded LU: pivot " + std::to_string(pivot) +
                                " at row " + std::to_string(k) +
                                " below singularity threshold");
    }
    const int imax = std::min(n_ - 1, k + hbw_);
    for (int i = k + 1; i <= imax; ++i) {
      const double m = lu_[index(i, k)] / pivot;
      lu_[index(i, k)] = m;
      const int jmax = std::min(n_ - 1, k + hbw_);
      for (int j = k + 1; j <= jmax; ++j) {
        lu_[index(i, j)] -= m * lu_[index(k, j)];
      }
    }
  }
}

std::vector<double> BandedLU::solve(std::vector<double> rhs) const {
  // L y = b, unit lower triangular
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - hbw_);
    double acc = rhs[i];
    for (int j = j0; j < i; ++j) acc -= lu_[index(i, j)] * rhs[j];
    rhs[i] = acc;
  }
  // U x = y
  for (int i = n_ - 1; i >= 0; --i) {
    const int j1 = std::min(n_ - 1, i + hbw_);
    double acc = rhs[i];
    for (int j = i + 1; j <= j1; ++j) acc -= lu_[index(i, j)] * rhs[j];
    rhs[i] = acc / lu_[index(i, i)];
  }
  return rhs;
}

std::vector<double> BandedLU::solve_transposed(std::vector<double> rhs) const {
  // U^T z = b, lower triangular with U's diagonal
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - hbw_);
    double acc = rhs[i];
    for (int j = j0; j < i; ++j) acc -= lu_[index(j, i)] * rhs[j];
    rhs[i] = acc / lu_[index(i, i)];
  }
  // L^T x = z, unit upper triangular
  for (int i = n_ - 1; i >= 0; --i) {
    const int j1 = std::min(n_ - 1, i + hbw_);
    double acc = rhs[i];
    for (int j = i + 1; j <= j1; ++j) acc -= lu_[index(j, i)] * rhs[j];
    rhs[i] = acc;
  }
  return rhs;
}

std::vector<double> solve_banded(const BandedMatrix& a, std::vector<double> rhs) {
  return BandedLU(a).solve(std::move(rhs));
}

}  // namespace thinfilm
