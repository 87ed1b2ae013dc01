#include "thinfilm/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace thinfilm {

Potential::Potential(double hamaker, double eps) : hamaker_(hamaker), eps_(eps) {
  if (!std::isfinite(hamaker) || hamaker < 0.0) {
    throw std::invalid_argument("Potential: hamaker constant must be >= 0");
  }
  if (!std::isfinite(eps) || eps <= 0.0) {
    throw std::invalid_argument("Potential: regularization threshold must be > 0");
  }
}

double Potential::phi(double h) const {
  if (hamaker_ == 0.0) return 0.0;
  if (h < eps_) {
    const double e2 = eps_ * eps_;
    return 0.5 * hamaker_ / (e2 * e2) * h * h - hamaker_ / e2;
  }
  return -0.5 * hamaker_ / (h * h);
}

double Potential::phi_prime(double h) const {
  if (hamaker_ == 0.0) return 0.0;
  if (h < eps_) {
    const double e2 = eps_ * eps_;
    return hamaker_ / (e2 * e2) * h;
  }
  return hamaker_ / (h * h * h);
}

double Potential::phi_double_prime(double h) const {
  if (hamaker_ == 0.0) return 0.0;
  if (h < eps_) {
    const double e2 = eps_ * eps_;
    return hamaker_ / (e2 * e2);
  }
  return -3.0 * hamaker_ / (h * h * h * h);
}

double Potential::phi_plus(double h) const {
  if (hamaker_ == 0.0) return 0.0;
  const double e2 = eps_ * eps_;
  return 0.5 * hamaker_ / (e2 * e2) * h * h;
}

double Potential::phi_plus_prime(double h) const {
  if (hamaker_ == 0.0) return 0.0;
  const double e2 = eps_ * eps_;
  return hamaker_ / (e2 * e2) * h;
}

double Potential::phi_plus_double_prime() const {
  if (hamaker_ == 0.0) return 0.0;
  const double e2 = eps_ * eps_;
  return hamaker_ / (e2 * e2);
}

double Potential::phi_minus(double h) const {
  if (hamaker_ == 0.0) return 0.0;
  if (h < eps_) {
    // The quadratic parts cancel exactly, leaving the matching constant.
    return -hamaker_ / (eps_ * eps_);
  }
  return -0.5 * hamaker_ / (h * h) - phi_plus(h);
}

double Potential::phi_minus_prime(double h) const {
  if (hamaker_ == 0.0 || h < eps_) return 0.0;
  return hamaker_ / (h * h * h) - phi_plus_prime(h);
}

double Potential::phi_minus_double_prime(double h) const {
  if (hamaker_ == 0.0 || h < eps_) return 0.0;
  return -3.0 * hamaker_ / (h * h * h * h) - phi_plus_double_prime();
}

double Potential::lipschitz_bound() const {
  const double e2 = eps_ * eps_;
  return 3.0 * hamaker_ / (e2 * e2);
}

}  // namespace thinfilm
