#pragma once

#include <span>
#include <vector>

namespace thinfilm {

/// Square banded matrix stored as order x (2*half_bandwidth + 1) bands,
/// row i holding entries A(i, i-b .. i+b).
class BandedMatrix {
 public:
  BandedMatrix(int order, int half_bandwidth);

  int order() const { return n_; }
  int half_bandwidth() const { return hbw_; }

  /// Entry access; reads outside the band return 0.
  double operator()(int i, int j) const;
  /// In-band reference for assembly. Caller must keep |i - j| <= half_bandwidth.
  double& at(int i, int j) { return bands_[index(i, j)]; }
  void add(int i, int j, double v) { bands_[index(i, j)] += v; }

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_transpose(std::span<const double> x) const;

  double max_abs() const;

  /// dst entries become a*A + b*B (same order and bandwidth required).
  static BandedMatrix scaled_sum(double a, const BandedMatrix& A, double b,
                                 const BandedMatrix& B);

 private:
  friend class BandedLU;
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * (2 * hbw_ + 1) + (j - i + hbw_);
  }
  int n_;
  int hbw_;
  std::vector<double> bands_;
};

/// LU factorization of a BandedMatrix without pivoting. Factorization fails
/// with SingularMatrixError when a pivot magnitude drops below
/// 1e-14 * max|entry| of the assembled matrix.
class BandedLU {
 public:
  explicit BandedLU(const BandedMatrix& a);

  std::vector<double> solve(std::vector<double> rhs) const;
  /// Solves A^T x = rhs using the same factorization (A = LU gives
  /// A^T = U^T L^T).
  std::vector<double> solve_transposed(std::vector<double> rhs) const;

 private:
  int n_;
  int hbw_;
  std::vector<double> lu_;
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * (2 * hbw_ + 1) + (j - i + hbw_);
  }
};

/// One-shot factor-and-solve.
std::vector<double> solve_banded(const BandedMatrix& a, std::vector<double> rhs);

}  // namespace thinfilm
