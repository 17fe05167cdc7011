#pragma once

#include "modform/derivation.hpp"

namespace modform {

/// Quadratic form E(xi) = <xi, A xi> with A = delta* delta, the generator of
/// the associated symmetric semigroup on the GNS space.
struct FormGenerator {
  ContextPtr ctx;
  MatrixXcd a;  // dim x dim, Hermitian positive semidefinite
  std::string instance;

  double energy(const VectorXcd& xi) const {
    return std::real(xi.dot(a * xi));
  }
};

FormGenerator build_form(const Derivation& d);

/// T_t = exp(-tA) on the GNS space and its algebra picture
/// P_t = Lambda^{-1} T_t Lambda, via the eigendecomposition of A.
class Semigroup {
 public:
  Semigroup(ContextPtr ctx, const MatrixXcd& a);

  const ContextPtr& context() const { return ctx_; }
  MatrixXcd gns_at(double t) const;  // T_t; throws for t < 0
  MatrixXcd alg_at(double t) const;  // P_t on algebra coordinates
  const VectorXd& eigenvalues() const { return evals_; }

 private:
  ContextPtr ctx_;
  VectorXd evals_;
  MatrixXcd evecs_;
};

/// Snapshot of the semigroup at one time.
struct SemigroupSnapshot {
  double t = 0;
  MatrixXcd gns;  // T_t
  MatrixXcd alg;  // P_t
};
SemigroupSnapshot semigroup_at(const FormGenerator& gen, double t);

/// Metric projection of a self-adjoint xi onto the cone
/// {rho^{1/4} x rho^{1/4} : 0 <= x <= 1} by projected gradient with step
/// 1/(2 lambda_max(rho)) and spectral clipping; warm-started at the clipped
/// unconstrained solution. Throws NumericError at the iteration cap unless
/// stats is supplied (then stats->converged records the failure).
AlgebraElement project_cone(const AlgebraElement& xi, const FaithfulState& phi,
                            const SolverOptions& opts = {},
                            ConeStats* stats = nullptr);

/// Cone data shared by all realizations: the embedding x -> Delta^{1/4}
/// Lambda(x), the operator picture used for spectral clipping, and the
/// gradient step 1/(2 lambda_max(embed* embed)).
struct ConeGeometry {
  MatrixXcd embed;
  MatrixXcd embed_inv;
  MatrixXcd star_conj;
  std::function<MatrixXcd(const VectorXcd&)> represent;
  std::function<VectorXcd(const MatrixXcd&)> corepresent;
  double step = 0;
};
ConeGeometry cone_geometry(const TomitaContext& ctx);

/// Projected-gradient cone projection in an arbitrary context, through its
/// operator picture (the coordinate metric is proportional to the
/// Hilbert-Schmidt metric of the picture, so clipping is the exact interval
/// projection).
VectorXcd project_cone(const ConeGeometry& geo, const VectorXcd& xi,
                       const SolverOptions& opts = {}, ConeStats* stats = nullptr);

/// Install the generic projected-gradient projector as ctx->cone_project.
void attach_generic_cone(const std::shared_ptr<TomitaContext>& ctx);

/// Dirichlet property of the form: E o J = E as a matrix identity and
/// E(P_C xi) <= E(xi) on random J-fixed samples, reporting the worst margin.
CertificationReport check_dirichlet(const FormGenerator& gen, int samples,
                                    std::uint64_t seed,
                                    const Tolerances& tols = {},
                                    const SolverOptions& opts = {});

/// Dirichlet property of all amplifications M (x) M_n, n = 1..n_max, each
/// via the context's amplify hook, cross-checked against complete positivity
/// of P_t (Choi matrices on a time grid). A verdict disagreement between the
/// two routes is reported as a failing consistency check.
CertificationReport check_completely_dirichlet(
    const FormGenerator& gen, int n_max, int samples, std::uint64_t seed,
    const Tolerances& tols = {}, const SolverOptions& opts = {},
    const std::vector<double>& t_grid = default_t_grid());

/// Commutation [A, log Delta] = 0 plus sampled invariance E(U_t xi) = E(xi).
CertificationReport check_modular(const FormGenerator& gen, int samples,
                                  std::uint64_t seed,
                                  const Tolerances& tols = {});

/// A' on the amplified context: n . P (I_{n^2} (x) A) P^dagger with P the
/// component-layout unitary.
MatrixXcd amplify_form(const TomitaContext::Amplified& amp, const MatrixXcd& a,
                       int n);

}  // namespace modform
