#pragma once

#include "modform/derivation.hpp"

namespace modform {

/// A finite group given by its multiplication table (validated: closure,
/// associativity, identity and inverses hold exactly).
class GroupSpec {
 public:
  static GroupSpec build(const std::vector<std::vector<int>>& table);
  static GroupSpec cyclic(int n);
  static GroupSpec symmetric3();
  /// "cyclic:n" or "sym:3".
  static GroupSpec preset(const std::string& name);

  int order() const { return n_; }
  int identity() const { return e_; }
  int mul(int g, int h) const { return table_[g][h]; }
  int inv(int g) const { return inv_[g]; }

 private:
  int n_ = 0;
  int e_ = 0;
  std::vector<std::vector<int>> table_;
  std::vector<int> inv_;
};

/// Real orthogonal representation g -> pi(g).
struct OrthogonalRep {
  int d = 0;
  std::vector<MatrixXd> mats;
};

/// pi(gh) = pi(g)pi(h), pi(e) = I, orthogonality; residuals reported.
CertificationReport check_orthogonal_rep(const GroupSpec& g,
                                         const OrthogonalRep& pi,
                                         double tol = 1e-10);

/// Rotation representation of a cyclic group on R^2.
OrthogonalRep rotation_rep(const GroupSpec& zn);
/// Sign representation of Z_2.
OrthogonalRep sign_rep();
/// Standard 2-dimensional representation of S_3 (permutation action on the
/// mean-zero plane of R^3).
OrthogonalRep standard_rep_s3(const GroupSpec& s3);

/// 1-cocycle value table b: G -> R^d for an orthogonal representation.
struct Cocycle {
  std::vector<VectorXd> b;
};

/// b(gh) = b(g) + pi(g) b(h) over all pairs; b(e) = 0.
CertificationReport check_cocycle(const Cocycle& b, const OrthogonalRep& pi,
                                  const GroupSpec& g, double tol = 1e-10);

/// psi(g) = |b(g)|^2.
VectorXd cocycle_psi(const Cocycle& b);

/// Conditional negative definiteness of psi: the psi-Gram matrix compressed
/// to the mean-zero subspace has no positive eigenvalue, and e^{-t psi} is
/// positive definite on the t-grid.
CertificationReport cnd_check(const GroupSpec& g, const VectorXd& psi,
                              const Tolerances& tols = {},
                              const std::vector<double>& t_grid = default_t_grid());

/// Draw a cocycle from the nullspace of the (linear) cocycle constraint
/// system with Gaussian coefficients.
Cocycle sample_cocycle(const GroupSpec& g, const OrthogonalRep& pi,
                       SplitMix64& rng);

/// Group algebra C[G] with the normalized trace tau(sum c_g lambda(g)) = c_e
/// as a Tomita context on l^2(G); tracial, Delta = id.
ContextPtr make_group_context(const GroupSpec& g, std::string name = "group");

/// l^2(G; C^d) with left action through pi and twisted translations,
/// J xi(g) = -pi(g) conj(xi(g^{-1})), trivial flow.
TomitaBimodule group_bimodule(const GroupSpec& g, const OrthogonalRep& pi,
                              const ContextPtr& ctx);

/// delta(f)(g) = f(g) b(g) into the group bimodule. Requires a valid cocycle.
Derivation cocycle_derivation(const GroupSpec& g, const OrthogonalRep& pi,
                              const Cocycle& b, const ContextPtr& ctx);

/// lambda(g) -> e^{-t psi(g)} lambda(g) on algebra coordinates; t >= 0.
MatrixXcd multiplier_semigroup(const VectorXd& psi, double t);

}  // namespace modform
