#pragma once

#include "modform/bimodule.hpp"

namespace modform {

/// A closable derivation delta: GNS space -> Tomita bimodule, stored as its
/// m x dim matrix in coordinates. Symmetry is expressed through the
/// intertwining relations delta J = J delta and delta U_t = U_t delta.
struct Derivation {
  ContextPtr ctx;
  TomitaBimodule target;
  MatrixXcd map;  // m x dim
  std::string instance;

  VectorXcd apply(const VectorXcd& a) const { return map * a; }
  MatrixXcd adjoint() const { return map.adjoint(); }
};

/// delta(a) = i(xi.a - a.xi, (J xi).a - a.(J xi)) into the doubled bimodule,
/// for xi a Delta-eigenvector with eigenvalue e^omega. Throws
/// PreconditionError (with the residual) when xi is not an eigenvector.
Derivation inner_derivation(const ContextPtr& ctx, const VectorXcd& xi,
                            double omega, double precondition_tol = 1e-9);

/// Splits an arbitrary xi into modular eigencomponents and sums the inner
/// derivations, targeting a direct sum of doubled bimodules. Components with
/// norm below 1e-12 * |xi| are dropped.
Derivation eigen_decomposed_inner_derivation(const ContextPtr& ctx,
                                             const VectorXcd& xi);

/// L(xi): b -> xi.b and R(xi): a -> a.xi with the operator norm bound
/// max(|L|, |R|) they satisfy.
struct BoundedVectorOps {
  MatrixXcd l;  // m x dim
  MatrixXcd r;  // m x dim
  double bound = 0;
};
BoundedVectorOps bounded_vector_ops(const TomitaBimodule& h, const VectorXcd& xi);

/// Product rule (exact on the basis and on random samples), delta(1) = 0,
/// J-intertwining and U-equivariance at sampled real and imaginary times.
CertificationReport check_derivation(const Derivation& d, int samples,
                                     std::uint64_t seed,
                                     const Tolerances& tols = {});

/// The adjoint identity
///   delta*(a xi b) = a delta*(xi) b - L(delta(a#))* (xi b) - R(delta(b-flat))* (a xi)
/// on random a, b, xi.
CertificationReport check_adjoint_identity(const Derivation& d, int samples,
                                           std::uint64_t seed, double tol = 1e-8);

}  // namespace modform
