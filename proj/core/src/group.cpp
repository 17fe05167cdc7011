#include "modform/group.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <numbers>

#include "modform/dirichlet.hpp"

namespace modform {

GroupSpec GroupSpec::build(const std::vector<std::vector<int>>& table) {
  int n = static_cast<int>(table.size());
  if (n == 0) throw ConfigError("empty multiplication table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n)
      throw ConfigError("multiplication table is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw ConfigError("table entry out of range");
  }
  for (int g = 0; g < n; ++g)
    for (int h1 = 0; h1 < n; ++h1)
      for (int h2 = 0; h2 < n; ++h2)
        if (table[table[g][h1]][h2] != table[g][table[h1][h2]])
          throw ConfigError("multiplication table is not associative");

  int e = -1;
  for (int c = 0; c < n; ++c) {
    bool ok = true;
    for (int g = 0; g < n; ++g)
      ok = ok && table[c][g] == g && table[g][c] == g;
    if (ok) {
      e = c;
      break;
    }
  }
  if (e < 0) throw ConfigError("multiplication table has no identity");

  GroupSpec spec;
  spec.n_ = n;
  spec.e_ = e;
  spec.table_ = table;
  spec.inv_.assign(n, -1);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h)
      if (table[g][h] == e && table[h][g] == e) spec.inv_[g] = h;
    if (spec.inv_[g] < 0) throw ConfigError("element without inverse");
  }
  return spec;
}

GroupSpec GroupSpec::cyclic(int n) {
  if (n < 1) throw ConfigError("cyclic group order must be positive");
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) t[g][h] = (g + h) % n;
  return build(t);
}

namespace {

// Permutations of {0,1,2} in lexicographic order; table[g][h] applies h first.
std::vector<std::array<int, 3>> s3_permutations() {
  std::array<int, 3> p = {0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return perms;
}

}  // namespace

GroupSpec GroupSpec::symmetric3() {
  auto perms = s3_permutations();
  int n = static_cast<int>(perms.size());
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) {
      std::array<int, 3> comp;
      for (int x = 0; x < 3; ++x) comp[x] = perms[g][perms[h][x]];
      t[g][h] = static_cast<int>(
          std::find(perms.begin(), perms.end(), comp) - perms.begin());
    }
  return build(t);
}

GroupSpec GroupSpec::preset(const std::string& name) {
  if (name.rfind("cyclic:", 0) == 0)
    return cyclic(std::stoi(name.substr(7)));
  if (name == "sym:3") return symmetric3();
  throw ConfigError("unknown group preset: " + name);
}

CertificationReport check_orthogonal_rep(const GroupSpec& g,
                                         const OrthogonalRep& pi, double tol) {
  CertificationReport rep;
  rep.instance = "orthogonal representation";
  int n = g.order();
  if (static_cast<int>(pi.mats.size()) != n)
    throw ConfigError("representation size mismatch");

  double id_res = (pi.mats[g.identity()] - MatrixXd::Identity(pi.d, pi.d)).norm();
  double orth = 0, hom = 0;
  for (int a = 0; a < n; ++a) {
    orth = std::max(orth, (pi.mats[a].transpose() * pi.mats[a] -
                           MatrixXd::Identity(pi.d, pi.d))
                              .norm());
    for (int b = 0; b < n; ++b)
      hom = std::max(hom,
                     (pi.mats[g.mul(a, b)] - pi.mats[a] * pi.mats[b]).norm());
  }
  rep.add("identity", id_res, tol);
  rep.add("orthogonality", orth, tol);
  rep.add("homomorphism", hom, tol);
  return rep;
}

OrthogonalRep rotation_rep(const GroupSpec& zn) {
  int n = zn.order();
  OrthogonalRep pi;
  pi.d = 2;
  for (int k = 0; k < n; ++k) {
    double a = 2.0 * std::numbers::pi * k / n;
    MatrixXd m(2, 2);
    m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    pi.mats.push_back(m);
  }
  return pi;
}

OrthogonalRep sign_rep() {
  OrthogonalRep pi;
  pi.d = 1;
  pi.mats.push_back(MatrixXd::Identity(1, 1));
  pi.mats.push_back(-MatrixXd::Identity(1, 1));
  return pi;
}

OrthogonalRep standard_rep_s3(const GroupSpec& s3) {
  if (s3.order() != 6) throw ConfigError("expected a group of order 6");
  auto perms = s3_permutations();
  MatrixXd basis(3, 2);
  basis.col(0) = Eigen::Vector3d(1, -1, 0) / std::sqrt(2.0);
  basis.col(1) = Eigen::Vector3d(1, 1, -2) / std::sqrt(6.0);
  OrthogonalRep pi;
  pi.d = 2;
  for (const auto& p : perms) {
    MatrixXd perm = MatrixXd::Zero(3, 3);
    for (int i = 0; i < 3; ++i) perm(p[i], i) = 1;
    pi.mats.push_back(basis.transpose() * perm * basis);
  }
  return pi;
}

CertificationReport check_cocycle(const Cocycle& b, const OrthogonalRep& pi,
                                  const GroupSpec& g, double tol) {
  CertificationReport rep;
  rep.instance = "cocycle";
  int n = g.order();
  if (static_cast<int>(b.b.size()) != n ||
      static_cast<int>(pi.mats.size()) != n)
    throw ConfigError("cocycle / representation size mismatch");
  for (const auto& v : b.b)
    if (v.size() != pi.d) throw ConfigError("cocycle value dimension mismatch");

  double worst = 0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      worst = std::max(
          worst, (b.b[g.mul(x, y)] - b.b[x] - pi.mats[x] * b.b[y]).norm());
  rep.add("cocycle_identity", worst, tol);
  rep.add("vanishes_at_identity", b.b[g.identity()].norm(), tol);
  return rep;
}

VectorXd cocycle_psi(const Cocycle& b) {
  VectorXd psi(static_cast<Index>(b.b.size()));
  for (Index g = 0; g < psi.size(); ++g) psi(g) = b.b[g].squaredNorm();
  return psi;
}

CertificationReport cnd_check(const GroupSpec& g, const VectorXd& psi,
                              const Tolerances& tols,
                              const std::vector<double>& t_grid) {
  CertificationReport rep;
  rep.instance = "conditionally negative definite";
  int n = g.order();
  if (psi.size() != n) throw ConfigError("psi length mismatch");

  double sym = 0;
  for (int x = 0; x < n; ++x)
    sym = std::max(sym, std::abs(psi(x) - psi(g.inv(x))));
  rep.add("identity_value", std::abs(psi(g.identity())), tols.general);
  rep.add("inverse_symmetry", sym, tols.general);

  MatrixXd gram(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) gram(x, y) = psi(g.mul(g.inv(x), y));
  MatrixXd mean_zero =
      MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / n);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(mean_zero * gram * mean_zero);
  rep.add_margin("conditioned_gram", es.eigenvalues().maxCoeff(), tols.general);

  double worst = 0;
  for (double t : t_grid) {
    MatrixXd k(n, n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) k(x, y) = std::exp(-t * gram(x, y));
    Eigen::SelfAdjointEigenSolver<MatrixXd> ek(k);
    worst = std::max(worst, -ek.eigenvalues().minCoeff());
  }
  rep.add_margin("schoenberg_kernel", worst, tols.general);
  return rep;
}

Cocycle sample_cocycle(const GroupSpec& g, const OrthogonalRep& pi,
                       SplitMix64& rng) {
  int n = g.order();
  int d = pi.d;
  MatrixXd c = MatrixXd::Zero((n * n + 1) * d, n * d);
  Index row = 0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      int xy = g.mul(x, y);
      c.block(row, xy * d, d, d) += MatrixXd::Identity(d, d);
      c.block(row, x * d, d, d) -= MatrixXd::Identity(d, d);
      c.block(row, y * d, d, d) -= pi.mats[x];
      row += d;
    }
  c.block(row, g.identity() * d, d, d) = MatrixXd::Identity(d, d);

  Eigen::FullPivLU<MatrixXd> lu(c);
  lu.setThreshold(1e-10);
  MatrixXd kernel = lu.kernel();
  VectorXd coeff(kernel.cols());
  for (Index i = 0; i < coeff.size(); ++i) coeff(i) = rng.gaussian();
  VectorXd flat = kernel * coeff;
  if (flat.norm() > 1e-12) flat /= flat.norm();

  Cocycle b;
  for (int x = 0; x < n; ++x) b.b.push_back(flat.segment(x * d, d));
  return b;
}

ContextPtr make_group_context(const GroupSpec& g, std::string name) {
  auto spec = std::make_shared<const GroupSpec>(g);
  auto ctx = std::make_shared<TomitaContext>();
  int n = spec->order();
  ctx->name = std::move(name);
  ctx->dim = n;

  ctx->unit = VectorXcd::Zero(n);
  ctx->unit(spec->identity()) = 1;
  ctx->alg_unit = ctx->unit;

  for (int h = 0; h < n; ++h) {
    MatrixXcd l = MatrixXcd::Zero(n, n);
    MatrixXcd r = MatrixXcd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
      l(spec->mul(h, x), x) = 1;
      r(spec->mul(x, h), x) = 1;
    }
    ctx->left_units.push_back(l);
    ctx->right_units.push_back(r);
  }

  MatrixXcd k = MatrixXcd::Zero(n, n);
  for (int x = 0; x < n; ++x) k(x, spec->inv(x)) = 1;
  ctx->sharp_conj = k;
  ctx->j_conj = k;
  ctx->star_conj = k;

  ctx->log_delta_evals = VectorXd::Zero(n);
  ctx->log_delta_evecs = MatrixXcd::Identity(n, n);
  ctx->lambda = MatrixXcd::Identity(n, n);
  ctx->lambda_inv = MatrixXcd::Identity(n, n);

  ctx->rep_dim = n;
  ctx->represent = [spec](const VectorXcd& v) -> MatrixXcd {
    int m = spec->order();
    MatrixXcd out = MatrixXcd::Zero(m, m);
    for (int h = 0; h < m; ++h)
      for (int x = 0; x < m; ++x) out(spec->mul(h, x), x) += v(h);
    return out;
  };
  ctx->corepresent = [spec](const MatrixXcd& m) -> VectorXcd {
    int nn = spec->order();
    VectorXcd v = VectorXcd::Zero(nn);
    for (int h = 0; h < nn; ++h) {
      Complex s = 0;
      for (int x = 0; x < nn; ++x) s += m(spec->mul(h, x), x);
      v(h) = s / static_cast<double>(nn);
    }
    return v;
  };

  attach_generic_cone(ctx);
  ctx->amplify = [w = std::weak_ptr<const TomitaContext>(ctx)](
                     int k_amp) -> TomitaContext::Amplified {
    ContextPtr base = w.lock();
    if (!base) throw NumericError("amplified context outlived its base");
    std::shared_ptr<TomitaContext> big = amplify_generic(base, k_amp);
    attach_generic_cone(big);
    return {big, MatrixXcd::Identity(big->dim, big->dim)};
  };
  return ctx;
}

TomitaBimodule group_bimodule(const GroupSpec& g, const OrthogonalRep& pi,
                              const ContextPtr& ctx) {
  int n = g.order();
  int d = pi.d;
  if (ctx->dim != n) throw ConfigError("context does not match the group");

  TomitaBimodule h;
  h.name = "group bimodule";
  h.ctx = ctx;
  h.m = static_cast<Index>(n) * d;

  for (int a = 0; a < n; ++a) {
    MatrixXcd l = MatrixXcd::Zero(h.m, h.m);
    MatrixXcd r = MatrixXcd::Zero(h.m, h.m);
    for (int x = 0; x < n; ++x) {
      l.block(g.mul(a, x) * d, x * d, d, d) = pi.mats[a].cast<Complex>();
      r.block(g.mul(x, a) * d, x * d, d, d) = MatrixXcd::Identity(d, d);
    }
    h.left_units.push_back(l);
    h.right_units.push_back(r);
  }

  h.j_conj = MatrixXcd::Zero(h.m, h.m);
  for (int x = 0; x < n; ++x)
    h.j_conj.block(x * d, g.inv(x) * d, d, d) = -pi.mats[x].cast<Complex>();

  h.gen_log_evals = VectorXd::Zero(h.m);
  h.gen_evecs = MatrixXcd::Identity(h.m, h.m);
  return h;
}

Derivation cocycle_derivation(const GroupSpec& g, const OrthogonalRep& pi,
                              const Cocycle& b, const ContextPtr& ctx) {
  CertificationReport valid = check_cocycle(b, pi, g, 1e-10);
  if (!valid.pass())
    throw PreconditionError("cocycle identity violated; cannot build derivation");

  Derivation d;
  d.ctx = ctx;
  d.target = group_bimodule(g, pi, ctx);
  d.instance = "cocycle";
  d.map = MatrixXcd::Zero(d.target.m, ctx->dim);
  for (int x = 0; x < g.order(); ++x)
    d.map.block(x * pi.d, x, pi.d, 1) = b.b[x].cast<Complex>();
  return d;
}

MatrixXcd multiplier_semigroup(const VectorXd& psi, double t) {
  if (t < 0) throw ConfigError("multiplier time must be nonnegative");
  VectorXcd diag(psi.size());
  for (Index i = 0; i < psi.size(); ++i) diag(i) = std::exp(-t * psi(i));
  return MatrixXcd(diag.asDiagonal());
}

}  // namespace modform
