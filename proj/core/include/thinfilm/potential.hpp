#pragma once

namespace thinfilm {

/// Regularized interface potential driving film rupture, with its
/// convex/concave split used by the IMEX scheme.
///
/// Below the threshold eps the potential is the matching quadratic
///   phi(h) = A/(2 eps^4) h^2 - A/eps^2,
/// above it the attractive tail
///   phi(h) = -A/2 h^-2.
/// phi and phi' are continuous at eps and phi' is globally Lipschitz with
/// constant 3A/eps^4. The split is
///   phi_plus(h)  = A/(2 eps^4) h^2           (convex everywhere),
///   phi_minus(h) = phi(h) - phi_plus(h)      (concave everywhere).
/// Negative h is evaluated on the quadratic branch so every function stays
/// globally defined. hamaker == 0 switches the physics off entirely.
class Potential {
 public:
  Potential() = default;
  Potential(double hamaker, double eps);

  double hamaker() const { return hamaker_; }
  double eps() const { return eps_; }

  double phi(double h) const;
  double phi_prime(double h) const;
  double phi_double_prime(double h) const;

  double phi_plus(double h) const;
  double phi_plus_prime(double h) const;
  /// Constant A/eps^4; this coefficient also scales the implicit mass term of
  /// the IMEX step.
  double phi_plus_double_prime() const;

  double phi_minus(double h) const;
  double phi_minus_prime(double h) const;
  double phi_minus_double_prime(double h) const;

  /// Global Lipschitz constant of phi'.
  double lipschitz_bound() const;

 private:
  double hamaker_ = 0.0;
  double eps_ = 0.1;
};

}  // namespace thinfilm
