#pragma once

#include <functional>
#include <memory>
#include <string>

#include "modform/algebra.hpp"
#include "modform/modular.hpp"

namespace modform {

struct MatrixRealization;

/// Options for the convex cone projection solver.
struct SolverOptions {
  double tol = 1e-9;       // stop when the iterate change drops below this
  int max_iter = 50000;
  bool accelerated = false;  // Nesterov momentum variant
};

/// Diagnostics returned by a cone projection call.
struct ConeStats {
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = true;
  bool monotone = true;  // objective decreased monotonically
};

/// A finite-dimensional Tomita algebra presented on its GNS space C^dim:
/// product, involutions, modular generator and the order structure (cone
/// projection) needed by the Dirichlet machinery. Matrix algebras with a
/// faithful state and finite group algebras both build one of these.
class TomitaContext {
 public:
  std::string name;
  Index dim = 0;

  VectorXcd unit;       // Lambda(1)
  VectorXcd alg_unit;   // coordinates of 1 in the algebra basis

  // pi_l / pi_r of the coordinate basis vectors; pi_l(a) = sum_a a_k left_units[k].
  std::vector<MatrixXcd> left_units;
  std::vector<MatrixXcd> right_units;

  MatrixXcd sharp_conj;  // a# = sharp_conj * conj(a)
  MatrixXcd j_conj;      // J a  = j_conj * conj(a)
  MatrixXcd star_conj;   // x* on algebra coordinates (antilinear)

  // log Delta = V diag(w) V^dagger (self-adjoint).
  VectorXd log_delta_evals;
  MatrixXcd log_delta_evecs;

  MatrixXcd lambda;      // Lambda: algebra coords -> GNS coords
  MatrixXcd lambda_inv;

  /// Metric projection onto the Dirichlet cone C = closure{Delta^{1/4}
  /// Lambda(x) : 0 <= x <= 1}, defined on J-fixed vectors.
  std::function<VectorXcd(const VectorXcd&, const SolverOptions&, ConeStats*)>
      cone_project;

  /// Concrete operator picture of the algebra on C^rep_dim, used for Choi
  /// matrices: `represent` maps algebra coordinates to an operator,
  /// `corepresent` is the compatible conditional expectation back.
  Index rep_dim = 0;
  std::function<MatrixXcd(const VectorXcd&)> represent;
  std::function<VectorXcd(const MatrixXcd&)> corepresent;

  struct Amplified {
    std::shared_ptr<const TomitaContext> ctx;
    // Unitary from component layout ((i,j)-major, base coords minor) to the
    // amplified context's own coordinates.
    MatrixXcd layout;
  };
  /// Tensor with M_n(C) under the state phi (x) tr_n.
  std::function<Amplified(int)> amplify;

  /// Backing matrix realization when there is one.
  std::shared_ptr<const MatrixRealization> matrix;

  // -- derived operations ----------------------------------------------

  MatrixXcd pi_l(const VectorXcd& a) const;
  MatrixXcd pi_r(const VectorXcd& a) const;
  VectorXcd product(const VectorXcd& a, const VectorXcd& b) const;
  VectorXcd sharp(const VectorXcd& a) const { return sharp_conj * a.conjugate(); }
  VectorXcd jmap(const VectorXcd& v) const { return j_conj * v.conjugate(); }
  VectorXcd star(const VectorXcd& x) const { return star_conj * x.conjugate(); }

  /// U_z = exp(i z log Delta); Delta^z = exp(z log Delta).
  MatrixXcd flow_matrix(Complex z) const { return delta_pow_matrix(kI * z); }
  MatrixXcd delta_pow_matrix(Complex z) const;
  VectorXcd flow(Complex z, const VectorXcd& v) const;
  VectorXcd flat(const VectorXcd& a) const { return flow(Complex(0, -1), sharp(a)); }
  MatrixXcd log_delta_matrix() const;

  Complex phi(const VectorXcd& x_alg) const { return unit.dot(lambda * x_alg); }

  /// Product on algebra coordinates, xy = Lambda^{-1}(Lambda(x).Lambda(y)).
  VectorXcd alg_product(const VectorXcd& x, const VectorXcd& y) const {
    return lambda_inv * product(lambda * x, lambda * y);
  }

  /// Gaussian J-fixed unit vector (the sampling measure for Dirichlet checks).
  VectorXcd random_jfixed(SplitMix64& rng) const;

  double log_delta_spread() const {
    return log_delta_evals.size() == 0
               ? 0.0
               : log_delta_evals.maxCoeff() - log_delta_evals.minCoeff();
  }
};

using ContextPtr = std::shared_ptr<const TomitaContext>;

/// Context of a matrix algebra with faithful state in the realization
/// Lambda(x) = x rho^{1/2}. Keeps copies of the algebra and state alive.
ContextPtr make_gns_context(const MatrixAlgebra& alg, const FaithfulState& phi,
                            std::string name = "gns");

/// The matrix algebra / state backing a context built by make_gns_context
/// (null for non-matrix realizations).
struct MatrixRealization {
  MatrixAlgebra algebra;
  FaithfulState state;
};
inline const MatrixRealization* matrix_realization(const TomitaContext& ctx) {
  return ctx.matrix.get();
}

/// Cone solver options attached to matrix contexts at construction time.
ContextPtr make_gns_context(const MatrixAlgebra& alg, const FaithfulState& phi,
                            const SolverOptions& cone_opts, std::string name);

/// Shared plumbing for amplifications built directly in component layout;
/// the caller supplies the cone projector and amplify of the result.
std::shared_ptr<TomitaContext> amplify_generic(const ContextPtr& base, int n);

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b);

}  // namespace modform
