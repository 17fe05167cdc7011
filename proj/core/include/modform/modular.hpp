#pragma once

#include "modform/algebra.hpp"

namespace modform {

/// A GNS vector is a block-diagonal matrix in the Hilbert-Schmidt space;
/// it shares its representation with algebra elements.
using GnsVector = AlgebraElement;

/// One modular eigenspace: all matrix units (in rho's eigenbasis) whose
/// density-eigenvalue ratio log equals `omega` up to the grouping tolerance.
struct ModularEigenspace {
  double omega;                      // log of the Delta eigenvalue
  std::vector<VectorXcd> basis;      // orthonormal, in matrix-unit coordinates
};

/// Modular operator, conjugation and flow for a faithful state in the fixed
/// GNS realization Lambda(x) = x rho^{1/2}:
///   Delta xi = rho xi rho^{-1},   J xi = xi^*,   S = J Delta^{1/2}.
class ModularData {
 public:
  static ModularData build(const FaithfulState& phi);

  const FaithfulState& state() const { return *phi_; }
  const MatrixAlgebra& algebra() const { return phi_->algebra(); }

  GnsVector delta(const GnsVector& xi) const;        // rho xi rho^{-1}
  GnsVector delta_pow(Complex z, const GnsVector& xi) const;  // rho^z xi rho^{-z}
  GnsVector conjugation(const GnsVector& xi) const;  // J xi = xi^*
  GnsVector s_map(const GnsVector& xi) const;        // J Delta^{1/2}

  /// Modular flow U_z xi = rho^{iz} xi rho^{-iz}; entire in z. Throws a
  /// range error when |Im z| * spread(log rho) exceeds the exp overflow bound.
  GnsVector flow(Complex z, const GnsVector& xi) const;

  /// Decomposition of the GNS space into Delta eigenspaces, with eigenvalue
  /// ratios deduplicated at relative tolerance 1e-10.
  const std::vector<ModularEigenspace>& eigenspaces() const { return spaces_; }

  /// Component of xi in the eigenspace with log-eigenvalue omega_k.
  GnsVector eigencomponent(const GnsVector& xi, int k) const;

  double log_spread() const { return log_spread_; }

 private:
  const FaithfulState* phi_ = nullptr;
  std::vector<ModularEigenspace> spaces_;
  double log_spread_ = 0;
};

/// Tomita-algebra operations on GNS vectors:
///   a.b = a rho^{-1/2} b (so Lambda(x)Lambda(y) = Lambda(xy)),
///   a# = S a,  ab = U_{-i}(a#).
struct TomitaStructure {
  const FaithfulState* phi;
  const ModularData* mod;

  GnsVector product(const GnsVector& a, const GnsVector& b) const;
  GnsVector sharp(const GnsVector& a) const;
  GnsVector flat(const GnsVector& a) const;
};

}  // namespace modform
