#include "modform/derivation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace modform {

namespace {

template <typename A, typename B>
double rel_residual(const A& x, const B& y) {
  return (x - y).norm() / std::max({1.0, x.norm(), y.norm()});
}

}  // namespace

Derivation inner_derivation(const ContextPtr& ctx, const VectorXcd& xi,
                            double omega, double precondition_tol) {
  VectorXcd dxi = ctx->delta_pow_matrix(Complex(1, 0)) * xi;
  double res = (dxi - std::exp(omega) * xi).norm() / std::max(1.0, xi.norm());
  if (res > precondition_tol) {
    std::ostringstream msg;
    msg << "inner derivation requires a modular eigenvector: |Delta xi - "
           "e^omega xi| / |xi| = "
        << res;
    throw PreconditionError(msg.str());
  }

  Derivation d;
  d.ctx = ctx;
  d.target = doubled_bimodule(ctx, omega);
  d.instance = "inner";
  Index n = ctx->dim;
  VectorXcd jxi = ctx->jmap(xi);
  d.map.resize(2 * n, n);
  for (Index k = 0; k < n; ++k) {
    d.map.col(k).head(n) = kI * (ctx->right_units[k] * xi - ctx->left_units[k] * xi);
    d.map.col(k).tail(n) =
        kI * (ctx->right_units[k] * jxi - ctx->left_units[k] * jxi);
  }
  return d;
}

Derivation eigen_decomposed_inner_derivation(const ContextPtr& ctx,
                                             const VectorXcd& xi) {
  Index n = ctx->dim;
  VectorXcd coeff = ctx->log_delta_evecs.adjoint() * xi;

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return ctx->log_delta_evals(a) < ctx->log_delta_evals(b);
  });

  const double group_tol = 1e-10;
  const double drop_tol = 1e-12 * std::max(1.0, xi.norm());
  std::vector<std::pair<double, VectorXcd>> components;
  Index pos = 0;
  while (pos < n) {
    double w = ctx->log_delta_evals(order[pos]);
    VectorXcd comp = VectorXcd::Zero(n);
    Index end = pos;
    while (end < n &&
           std::abs(ctx->log_delta_evals(order[end]) - w) <=
               group_tol * std::max({1.0, std::abs(w),
                                     std::abs(ctx->log_delta_evals(order[end]))})) {
      Index k = order[end];
      comp += ctx->log_delta_evecs.col(k) * coeff(k);
      ++end;
    }
    if (comp.norm() > drop_tol) components.push_back({w, comp});
    pos = end;
  }

  if (components.empty()) {
    Derivation d;
    d.ctx = ctx;
    d.target = doubled_bimodule(ctx, 0.0);
    d.map = MatrixXcd::Zero(2 * n, n);
    d.instance = "inner (zero)";
    return d;
  }

  std::vector<TomitaBimodule> parts;
  std::vector<MatrixXcd> maps;
  for (const auto& [w, comp] : components) {
    Derivation piece = inner_derivation(ctx, comp, w, 1e-8);
    parts.push_back(piece.target);
    maps.push_back(piece.map);
  }
  Derivation d;
  d.ctx = ctx;
  d.target = direct_sum(parts, "inner sum");
  d.instance = "inner (eigen-decomposed)";
  d.map.resize(d.target.m, n);
  Index off = 0;
  for (const auto& m : maps) {
    d.map.middleRows(off, m.rows()) = m;
    off += m.rows();
  }
  return d;
}

BoundedVectorOps bounded_vector_ops(const TomitaBimodule& h,
                                    const VectorXcd& xi) {
  Index d = h.ctx->dim;
  BoundedVectorOps ops;
  ops.l.resize(h.m, d);
  ops.r.resize(h.m, d);
  for (Index k = 0; k < d; ++k) {
    ops.l.col(k) = h.right_units[k] * xi;
    ops.r.col(k) = h.left_units[k] * xi;
  }
  double nl = ops.l.jacobiSvd().singularValues()(0);
  double nr = ops.r.jacobiSvd().singularValues()(0);
  ops.bound = std::max(nl, nr);
  return ops;
}

CertificationReport check_derivation(const Derivation& d, int samples,
                                     std::uint64_t seed,
                                     const Tolerances& tols) {
  CertificationReport rep;
  rep.instance = d.instance;
  rep.seed = seed;
  rep.tolerances["general"] = tols.general;

  const TomitaContext& c = *d.ctx;
  const TomitaBimodule& h = d.target;
  Index n = c.dim;
  double scale = std::max(1.0, d.map.norm());

  // delta(e_i b) = e_i delta(b) + delta(e_i) b, column by column; exact on
  // the basis certifies the rule by bilinearity.
  double basis_res = 0;
  for (Index i = 0; i < n; ++i) {
    MatrixXcd lhs = d.map * c.left_units[i];
    MatrixXcd rhs = h.left_units[i] * d.map;
    VectorXcd de = d.map.col(i);
    for (Index j = 0; j < n; ++j) rhs.col(j) += h.right_units[j] * de;
    basis_res = std::max(basis_res, (lhs - rhs).norm() / scale);
  }
  rep.add("product_rule_basis", basis_res, tols.general);

  rep.add("annihilates_unit", (d.map * c.unit).norm() / scale, tols.general);

  rep.add("j_intertwining",
          rel_residual(d.map * c.j_conj, h.j_conj * d.map.conjugate()),
          tols.general);

  double u_res = 0;
  for (double t : {0.05, 0.3, 1.0, -0.7, 2.0})
    u_res = std::max(
        u_res, rel_residual(d.map * c.flow_matrix(Complex(t, 0)),
                            h.ugroup_matrix(Complex(t, 0)) * d.map));
  rep.add("flow_intertwining", u_res, tols.general);

  double ui_res = 0;
  for (Complex z : {Complex(0, 1), Complex(0, -1)})
    ui_res = std::max(ui_res, rel_residual(d.map * c.flow_matrix(z),
                                           h.ugroup_matrix(z) * d.map));
  rep.add("analytic_flow_intertwining", ui_res, tols.general);

  SplitMix64 rng(SplitMix64::child(seed, 2));
  double sample_res = 0;
  for (int s = 0; s < samples; ++s) {
    VectorXcd a = rng.complex_gaussian_vector(n);
    VectorXcd b = rng.complex_gaussian_vector(n);
    VectorXcd lhs = d.map * c.product(a, b);
    VectorXcd rhs = h.act_l(a) * (d.map * b) + h.act_r(b) * (d.map * a);
    sample_res = std::max(sample_res, rel_residual(lhs, rhs));
  }
  rep.add("product_rule_samples", sample_res, tols.general);
  return rep;
}

CertificationReport check_adjoint_identity(const Derivation& d, int samples,
                                           std::uint64_t seed, double tol) {
  CertificationReport rep;
  rep.instance = d.instance;
  rep.seed = seed;
  rep.tolerances["adjoint"] = tol;

  const TomitaContext& c = *d.ctx;
  const TomitaBimodule& h = d.target;
  Index n = c.dim;
  MatrixXcd dstar = d.adjoint();

  SplitMix64 rng(SplitMix64::child(seed, 3));
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    VectorXcd a = rng.complex_gaussian_vector(n);
    VectorXcd b = rng.complex_gaussian_vector(n);
    VectorXcd xi = rng.complex_gaussian_vector(h.m);

    VectorXcd lhs = dstar * (h.act_l(a) * (h.act_r(b) * xi));

    BoundedVectorOps l_ops = bounded_vector_ops(h, d.map * c.sharp(a));
    BoundedVectorOps r_ops = bounded_vector_ops(h, d.map * c.flat(b));
    VectorXcd rhs = c.pi_l(a) * (c.pi_r(b) * (dstar * xi)) -
                    l_ops.l.adjoint() * (h.act_r(b) * xi) -
                    r_ops.r.adjoint() * (h.act_l(a) * xi);
    worst = std::max(worst, rel_residual(lhs, rhs));
  }
  rep.add("adjoint_identity", worst, tol);
  return rep;
}

}  // namespace modform
