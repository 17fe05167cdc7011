#include "modform/bimodule.hpp"

#include <cmath>

namespace modform {

namespace {

template <typename A, typename B>
double rel_residual(const A& x, const B& y) {
  return (x - y).norm() / std::max({1.0, x.norm(), y.norm()});
}

double op_norm(const MatrixXcd& m) {
  return m.jacobiSvd().singularValues()(0);
}

}  // namespace

MatrixXcd TomitaBimodule::act_l(const VectorXcd& a) const {
  MatrixXcd out = MatrixXcd::Zero(m, m);
  for (Index k = 0; k < static_cast<Index>(left_units.size()); ++k)
    if (a(k) != Complex(0)) out += a(k) * left_units[k];
  return out;
}

MatrixXcd TomitaBimodule::act_r(const VectorXcd& b) const {
  MatrixXcd out = MatrixXcd::Zero(m, m);
  for (Index k = 0; k < static_cast<Index>(right_units.size()); ++k)
    if (b(k) != Complex(0)) out += b(k) * right_units[k];
  return out;
}

MatrixXcd TomitaBimodule::generator_matrix() const {
  return generator_pow(Complex(1, 0));
}

MatrixXcd TomitaBimodule::generator_pow(Complex z) const {
  double worst = 0;
  for (Index k = 0; k < gen_log_evals.size(); ++k)
    worst = std::max(worst, std::abs((z * gen_log_evals(k)).real()));
  if (worst > 700.0)
    throw NumericError("bimodule generator power out of range (exp overflow)");
  VectorXcd d(gen_log_evals.size());
  for (Index k = 0; k < d.size(); ++k) d(k) = std::exp(z * gen_log_evals(k));
  return gen_evecs * d.asDiagonal() * gen_evecs.adjoint();
}

MatrixXcd TomitaBimodule::ugroup_matrix(Complex z) const {
  return generator_pow(kI * z);
}

VectorXcd TomitaBimodule::ugroup(Complex z, const VectorXcd& xi) const {
  return ugroup_matrix(z) * xi;
}

TomitaBimodule gns_self_bimodule(const ContextPtr& ctx) {
  TomitaBimodule h;
  h.name = "gns";
  h.ctx = ctx;
  h.m = ctx->dim;
  h.left_units = ctx->left_units;
  h.right_units = ctx->right_units;
  h.j_conj = ctx->j_conj;
  h.gen_log_evals = ctx->log_delta_evals;
  h.gen_evecs = ctx->log_delta_evecs;
  return h;
}

TomitaBimodule doubled_bimodule(const ContextPtr& ctx, double omega) {
  Index d = ctx->dim;
  TomitaBimodule h;
  h.name = "doubled";
  h.ctx = ctx;
  h.m = 2 * d;

  h.left_units.reserve(d);
  h.right_units.reserve(d);
  for (Index k = 0; k < d; ++k) {
    MatrixXcd l = MatrixXcd::Zero(2 * d, 2 * d);
    MatrixXcd r = MatrixXcd::Zero(2 * d, 2 * d);
    l.topLeftCorner(d, d) = ctx->left_units[k];
    l.bottomRightCorner(d, d) = ctx->left_units[k];
    r.topLeftCorner(d, d) = ctx->right_units[k];
    r.bottomRightCorner(d, d) = ctx->right_units[k];
    h.left_units.push_back(l);
    h.right_units.push_back(r);
  }

  h.j_conj = MatrixXcd::Zero(2 * d, 2 * d);
  h.j_conj.topRightCorner(d, d) = ctx->j_conj;
  h.j_conj.bottomLeftCorner(d, d) = ctx->j_conj;

  h.gen_log_evals.resize(2 * d);
  h.gen_log_evals.head(d) = ctx->log_delta_evals.array() - omega;
  h.gen_log_evals.tail(d) = ctx->log_delta_evals.array() + omega;
  h.gen_evecs = MatrixXcd::Zero(2 * d, 2 * d);
  h.gen_evecs.topLeftCorner(d, d) = ctx->log_delta_evecs;
  h.gen_evecs.bottomRightCorner(d, d) = ctx->log_delta_evecs;
  return h;
}

TomitaBimodule direct_sum(const std::vector<TomitaBimodule>& parts,
                          std::string name) {
  if (parts.empty()) throw ConfigError("direct_sum of no bimodules");
  TomitaBimodule h;
  h.name = std::move(name);
  h.ctx = parts.front().ctx;
  Index d = h.ctx->dim;
  Index m = 0;
  for (const auto& p : parts) {
    if (p.ctx != h.ctx)
      throw ConfigError("direct_sum over mismatched contexts");
    m += p.m;
  }
  h.m = m;
  h.left_units.assign(d, MatrixXcd::Zero(m, m));
  h.right_units.assign(d, MatrixXcd::Zero(m, m));
  h.j_conj = MatrixXcd::Zero(m, m);
  h.gen_log_evals.resize(m);
  h.gen_evecs = MatrixXcd::Zero(m, m);
  Index off = 0;
  for (const auto& p : parts) {
    for (Index k = 0; k < d; ++k) {
      h.left_units[k].block(off, off, p.m, p.m) = p.left_units[k];
      h.right_units[k].block(off, off, p.m, p.m) = p.right_units[k];
    }
    h.j_conj.block(off, off, p.m, p.m) = p.j_conj;
    h.gen_log_evals.segment(off, p.m) = p.gen_log_evals;
    h.gen_evecs.block(off, off, p.m, p.m) = p.gen_evecs;
    off += p.m;
  }
  return h;
}

CertificationReport check_bimodule_axioms(const TomitaBimodule& h, int samples,
                                          std::uint64_t seed,
                                          const Tolerances& tols) {
  CertificationReport rep;
  rep.instance = h.name;
  rep.seed = seed;
  rep.tolerances["general"] = tols.general;

  const TomitaContext& c = *h.ctx;
  Index d = c.dim;

  rep.add("action_unital",
          std::max(rel_residual(h.act_l(c.unit), MatrixXcd::Identity(h.m, h.m)),
                   rel_residual(h.act_r(c.unit), MatrixXcd::Identity(h.m, h.m))),
          tols.general);
  rep.add("j_involution",
          rel_residual(h.j_conj * h.j_conj.conjugate(),
                       MatrixXcd::Identity(h.m, h.m)),
          tols.general);
  rep.add("j_antiunitary",
          rel_residual(h.j_conj.adjoint() * h.j_conj,
                       MatrixXcd::Identity(h.m, h.m)),
          tols.general);

  // J A J = A^{-1}, the finite-dimensional form of U_z J = J U_{conj(z)}.
  {
    MatrixXcd a = h.generator_matrix();
    MatrixXcd a_inv = h.generator_pow(Complex(-1, 0));
    MatrixXcd jaj = h.j_conj * a.conjugate() * h.j_conj.conjugate();
    rep.add("j_flow_compatibility", rel_residual(jaj, a_inv), tols.general);
  }

  SplitMix64 rng(SplitMix64::child(seed, 1));
  double hom = 0, antihom = 0, star_l = 0, star_r = 0, comm = 0;
  double pairing = 0, norm_margin = 0, u_equiv = 0, j_action = 0, u_j = 0;
  std::vector<Complex> zs = {Complex(0.7, 0), Complex(-1.3, 0), Complex(0, 0.4),
                             Complex(0.3, -0.5)};
  for (int s = 0; s < samples; ++s) {
    VectorXcd a = rng.complex_gaussian_vector(d);
    VectorXcd b = rng.complex_gaussian_vector(d);
    VectorXcd xi = rng.complex_gaussian_vector(h.m);
    VectorXcd eta = rng.complex_gaussian_vector(h.m);

    MatrixXcd la = h.act_l(a), lb = h.act_l(b);
    MatrixXcd ra = h.act_r(a), rb = h.act_r(b);
    VectorXcd ab = c.product(a, b);

    hom = std::max(hom, rel_residual(h.act_l(ab), la * lb));
    antihom = std::max(antihom, rel_residual(h.act_r(ab), rb * ra));
    star_l = std::max(star_l, rel_residual(h.act_l(c.sharp(a)), la.adjoint()));
    star_r = std::max(star_r, rel_residual(h.act_r(c.flat(b)), rb.adjoint()));
    comm = std::max(comm, (la * rb - rb * la).norm() /
                              std::max({1.0, la.norm(), rb.norm()}));

    VectorXcd axb = la * (rb * xi);
    Complex lhs = axb.dot(eta);
    Complex rhs = xi.dot(h.act_l(c.sharp(a)) * (h.act_r(c.flat(b)) * eta));
    pairing = std::max(pairing,
                       std::abs(lhs - rhs) /
                           std::max({1.0, std::abs(lhs), std::abs(rhs)}));

    double bound = op_norm(c.pi_l(a)) * op_norm(c.pi_r(b)) * xi.norm();
    norm_margin = std::max(norm_margin, axb.norm() - bound);

    for (Complex z : zs) {
      VectorXcd l1 = h.ugroup(z, axb);
      VectorXcd l2 = h.act_l(c.flow(z, a)) *
                     (h.act_r(c.flow(z, b)) * h.ugroup(z, xi));
      u_equiv = std::max(u_equiv, rel_residual(l1, l2));
    }

    j_action = std::max(
        j_action, rel_residual(h.jmap(axb), h.act_l(c.jmap(b)) *
                                                (h.act_r(c.jmap(a)) *
                                                 h.jmap(xi))));

    for (double t : {0.6, -1.1}) {
      VectorXcd l1 = h.ugroup(Complex(t, 0), h.jmap(xi));
      VectorXcd l2 = h.jmap(h.ugroup(Complex(t, 0), xi));
      u_j = std::max(u_j, rel_residual(l1, l2));
    }
  }
  rep.add("left_action_homomorphism", hom, tols.general);
  rep.add("right_action_antihomomorphism", antihom, tols.general);
  rep.add("left_action_star", star_l, tols.general);
  rep.add("right_action_star", star_r, tols.general);
  rep.add("actions_commute", comm, tols.general);
  rep.add("adjoint_pairing", pairing, tols.general);
  rep.add_margin("norm_bound", norm_margin, tols.general);
  rep.add("flow_equivariance", u_equiv, tols.general);
  rep.add("j_action_reversal", j_action, tols.general);
  rep.add("flow_j_commutation", u_j, tols.general);
  return rep;
}

}  // namespace modform
