#pragma once

#include "modform/context.hpp"
#include "modform/report.hpp"

namespace modform {

/// A Tomita bimodule over a Tomita algebra: a carrier C^m with commuting
/// left/right actions, an antilinear involution and a positive invertible
/// generator A whose imaginary powers U_z = A^{iz} implement the flow.
/// In finite dimension the flow/involution compatibility is the matrix
/// identity J A J = A^{-1}.
class TomitaBimodule {
 public:
  std::string name;
  ContextPtr ctx;
  Index m = 0;

  // Actions of the coordinate basis of the algebra's GNS space:
  // a.xi = sum_k a_k left_units[k] xi, xi.b = sum_k b_k right_units[k] xi.
  std::vector<MatrixXcd> left_units;
  std::vector<MatrixXcd> right_units;

  MatrixXcd j_conj;  // antilinear involution, Jxi = j_conj * conj(xi)

  // Generator A = W exp(diag(w)) W^dagger, stored through its logarithm so
  // that A is positive and invertible by construction.
  VectorXd gen_log_evals;
  MatrixXcd gen_evecs;

  MatrixXcd act_l(const VectorXcd& a) const;
  MatrixXcd act_r(const VectorXcd& b) const;
  VectorXcd jmap(const VectorXcd& xi) const { return j_conj * xi.conjugate(); }

  MatrixXcd generator_matrix() const;          // A
  MatrixXcd generator_pow(Complex z) const;    // A^z
  MatrixXcd ugroup_matrix(Complex z) const;    // U_z = A^{iz}
  VectorXcd ugroup(Complex z, const VectorXcd& xi) const;

  double gen_log_spread() const {
    return gen_log_evals.size() == 0
               ? 0.0
               : gen_log_evals.maxCoeff() - gen_log_evals.minCoeff();
  }
};

/// The GNS space of the algebra as a bimodule over itself, with J = J_phi
/// and generator Delta.
TomitaBimodule gns_self_bimodule(const ContextPtr& ctx);

/// GNS (+) GNS with the diagonal actions, the swap involution
/// J(eta, zeta) = (J zeta, J eta) and generator
/// diag(e^{-omega} Delta, e^{omega} Delta).
TomitaBimodule doubled_bimodule(const ContextPtr& ctx, double omega);

/// Direct sum; a Tomita bimodule again, componentwise.
TomitaBimodule direct_sum(const std::vector<TomitaBimodule>& parts,
                          std::string name = "sum");

/// Per-axiom residual report: norm bounds, the adjoint pairing
/// <a xi b, eta> = <xi, a# eta b-flat>, equivariance of U_z and J,
/// homomorphism properties of the actions and J A J = A^{-1}.
CertificationReport check_bimodule_axioms(const TomitaBimodule& h, int samples,
                                          std::uint64_t seed,
                                          const Tolerances& tols = {});

}  // namespace modform
