#include "modform/crossed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace modform {

namespace {

double rel_residual(const MatrixXcd& x, const MatrixXcd& y) {
  return (x - y).norm() / std::max({1.0, x.norm(), y.norm()});
}

std::vector<MatrixXcd> unitary_powers(const MatrixXcd& u, int n) {
  std::vector<MatrixXcd> p(n);
  p[0] = MatrixXcd::Identity(u.rows(), u.cols());
  for (int g = 1; g < n; ++g) p[g] = p[g - 1] * u;
  return p;
}

// Crossed Tomita context from a base context and a GNS action unitary with
// u^n = 1 commuting with the modular data.
ContextPtr make_crossed_context(const ContextPtr& base, int n,
                                const MatrixXcd& u, std::string name) {
  Index d = base->dim;
  Index big = static_cast<Index>(n) * d;
  std::vector<MatrixXcd> up = unitary_powers(u, n);
  auto upow = [&](int g) -> const MatrixXcd& { return up[((g % n) + n) % n]; };

  auto ctx = std::make_shared<TomitaContext>();
  ctx->name = std::move(name);
  ctx->dim = big;
  ctx->unit = VectorXcd::Zero(big);
  ctx->unit.head(d) = base->unit;
  ctx->alg_unit = VectorXcd::Zero(big);
  ctx->alg_unit.head(d) = base->alg_unit;

  // pi_l(U^{-h} e_k) reused across fibers.
  std::vector<std::vector<MatrixXcd>> pl(n);
  for (int h = 0; h < n; ++h) {
    const MatrixXcd& um = upow(-h);
    for (Index k = 0; k < d; ++k) pl[h].push_back(base->pi_l(um.col(k)));
  }

  ctx->left_units.assign(big, MatrixXcd());
  ctx->right_units.assign(big, MatrixXcd());
  for (int g = 0; g < n; ++g)
    for (Index k = 0; k < d; ++k) {
      MatrixXcd l = MatrixXcd::Zero(big, big);
      MatrixXcd r = MatrixXcd::Zero(big, big);
      for (int h = 0; h < n; ++h) {
        l.block(((g + h) % n) * d, h * d, d, d) = pl[h][k];
        r.block(((h + g) % n) * d, h * d, d, d) =
            base->right_units[k] * upow(-g);
      }
      ctx->left_units[g * d + k] = l;
      ctx->right_units[g * d + k] = r;
    }

  MatrixXcd sharp = MatrixXcd::Zero(big, big);
  for (int g = 0; g < n; ++g)
    sharp.block(g * d, ((n - g) % n) * d, d, d) = upow(-g) * base->sharp_conj;
  ctx->sharp_conj = sharp;

  ctx->log_delta_evals.resize(big);
  ctx->log_delta_evecs = MatrixXcd::Zero(big, big);
  MatrixXcd lam = MatrixXcd::Zero(big, big);
  MatrixXcd lam_inv = MatrixXcd::Zero(big, big);
  MatrixXcd dm = MatrixXcd::Zero(big, big);
  MatrixXcd base_dm = base->delta_pow_matrix(Complex(-0.5, 0));
  for (int g = 0; g < n; ++g) {
    ctx->log_delta_evals.segment(g * d, d) = base->log_delta_evals;
    ctx->log_delta_evecs.block(g * d, g * d, d, d) = base->log_delta_evecs;
    lam.block(g * d, g * d, d, d) = base->lambda;
    lam_inv.block(g * d, g * d, d, d) = base->lambda_inv;
    dm.block(g * d, g * d, d, d) = base_dm;
  }
  ctx->lambda = lam;
  ctx->lambda_inv = lam_inv;
  ctx->j_conj = sharp * dm.conjugate();
  ctx->star_conj = lam_inv * sharp * lam.conjugate();

  // Regular covariant picture on l^2(Z_n) (x) C^rep: the crossed element
  // sum_g u_g pi~(x(g)) has block (h, h-g) = rep(alpha_{g-h}(x(g))).
  Index rb = base->rep_dim;
  std::vector<MatrixXcd> alpha(n);
  for (int m = 0; m < n; ++m)
    alpha[m] = base->lambda_inv * upow(m) * base->lambda;
  auto rep_base = base->represent;
  auto corep_base = base->corepresent;
  ctx->rep_dim = static_cast<Index>(n) * rb;
  ctx->represent = [rep_base, alpha, n, d, rb](const VectorXcd& v) -> MatrixXcd {
    MatrixXcd out = MatrixXcd::Zero(n * rb, n * rb);
    for (int g = 0; g < n; ++g)
      for (int h = 0; h < n; ++h) {
        int col = ((h - g) % n + n) % n;
        int a = ((g - h) % n + n) % n;
        out.block(h * rb, col * rb, rb, rb) +=
            rep_base(alpha[a] * v.segment(g * d, d));
      }
    return out;
  };
  ctx->corepresent = [corep_base, alpha, n, d, rb](const MatrixXcd& m) -> VectorXcd {
    VectorXcd v = VectorXcd::Zero(static_cast<Index>(n) * d);
    for (int g = 0; g < n; ++g) {
      VectorXcd acc = VectorXcd::Zero(d);
      for (int h = 0; h < n; ++h) {
        int col = ((h - g) % n + n) % n;
        int a = ((h - g) % n + n) % n;
        acc += alpha[a] * corep_base(m.block(h * rb, col * rb, rb, rb));
      }
      v.segment(g * d, d) = acc / static_cast<double>(n);
    }
    return v;
  };

  attach_generic_cone(ctx);
  ctx->amplify = [w = std::weak_ptr<const TomitaContext>(ctx)](
                     int k_amp) -> TomitaContext::Amplified {
    ContextPtr self = w.lock();
    if (!self) throw NumericError("amplified context outlived its base");
    std::shared_ptr<TomitaContext> big_ctx = amplify_generic(self, k_amp);
    attach_generic_cone(big_ctx);
    return {big_ctx, MatrixXcd::Identity(big_ctx->dim, big_ctx->dim)};
  };
  return ctx;
}

// Approximate gcd of the nonzero log Delta differences; 0 when all vanish.
double spectrum_gcd(const VectorXd& w, double tol) {
  double g = 0;
  for (Index i = 0; i < w.size(); ++i) {
    double v = std::abs(w(i));
    if (v < tol) continue;
    while (v > tol) {
      double r = std::fmod(g, v);
      g = v;
      v = r;
    }
  }
  return g;
}

}  // namespace

CrossedProduct build_crossed_modular(const ContextPtr& base, int n) {
  if (n < 1) throw ConfigError("crossed-product order must be positive");
  CrossedProduct x;
  x.base = base;
  x.n = n;

  double g = spectrum_gcd(base->log_delta_evals, 1e-9);
  if (g == 0) {
    // Tracial base: the flow is trivial and any step works.
    x.t0 = 1.0;
  } else {
    double period = 2.0 * std::numbers::pi / g;
    x.t0 = period / n;
  }
  x.u = base->flow_matrix(Complex(x.t0, 0));

  MatrixXcd un = MatrixXcd::Identity(base->dim, base->dim);
  for (int k = 0; k < n; ++k) un = un * x.u;
  if (rel_residual(un, MatrixXcd::Identity(base->dim, base->dim)) > 1e-8)
    throw ConfigError(
        "modular flow is not N-periodic (incommensurate log Delta spectrum)");

  x.ctx = make_crossed_context(base, n, x.u,
                               base->name + " x Z_" + std::to_string(n));
  return x;
}

CrossedProduct build_crossed(const ContextPtr& base, int n,
                             const MatrixXcd& action_alg) {
  if (n < 1) throw ConfigError("crossed-product order must be positive");
  Index d = base->dim;
  if (action_alg.rows() != d || action_alg.cols() != d)
    throw ConfigError("action matrix dimension mismatch");

  const double tol = 1e-10;
  SplitMix64 rng(0x9e3779b97f4a7c15ULL);
  double mult = 0;
  for (int s = 0; s < 20; ++s) {
    VectorXcd a = rng.complex_gaussian_vector(d);
    VectorXcd b = rng.complex_gaussian_vector(d);
    mult = std::max(mult, (action_alg * base->alg_product(a, b) -
                           base->alg_product(action_alg * a, action_alg * b))
                              .norm() /
                              std::max(1.0, a.norm() * b.norm()));
  }
  if (mult > tol) throw ConfigError("action is not multiplicative");
  if ((action_alg * base->star_conj - base->star_conj * action_alg.conjugate())
          .norm() > tol)
    throw ConfigError("action does not preserve the involution");
  double state_res = 0;
  for (Index k = 0; k < d; ++k) {
    VectorXcd e = VectorXcd::Unit(d, k);
    state_res = std::max(state_res,
                         std::abs(base->phi(action_alg * e) - base->phi(e)));
  }
  if (state_res > tol) throw ConfigError("action does not preserve the state");

  MatrixXcd an = MatrixXcd::Identity(d, d);
  for (int k = 0; k < n; ++k) an = an * action_alg;
  if (rel_residual(an, MatrixXcd::Identity(d, d)) > tol)
    throw ConfigError("action order does not divide N");

  CrossedProduct x;
  x.base = base;
  x.n = n;
  x.t0 = 0;
  x.u = base->lambda * action_alg * base->lambda_inv;

  MatrixXcd delta = base->delta_pow_matrix(Complex(1, 0));
  if (rel_residual(x.u * delta, delta * x.u) > 1e-9)
    throw ConfigError("action does not commute with the modular operator");
  if ((x.u * base->j_conj - base->j_conj * x.u.conjugate()).norm() > 1e-9)
    throw ConfigError("action does not commute with the modular conjugation");

  x.ctx = make_crossed_context(base, n, x.u,
                               base->name + " x Z_" + std::to_string(n));
  return x;
}

TomitaBimodule extend_bimodule(const CrossedProduct& x, const TomitaBimodule& h) {
  if (x.n > 1 && x.t0 == 0)
    throw ConfigError("bimodule extension requires a modular flow action");
  int n = x.n;
  Index d = x.base->dim;
  Index m = h.m;

  std::vector<MatrixXcd> wp(n);
  wp[0] = MatrixXcd::Identity(m, m);
  if (n > 1) {
    MatrixXcd w = h.ugroup_matrix(Complex(x.t0, 0));
    for (int g = 1; g < n; ++g) wp[g] = wp[g - 1] * w;
    if (rel_residual(wp[n - 1] * w, MatrixXcd::Identity(m, m)) > 1e-8)
      throw ConfigError("bimodule flow is not N-periodic");
  }
  auto wpow = [&](int g) -> const MatrixXcd& { return wp[((g % n) + n) % n]; };
  std::vector<MatrixXcd> up = unitary_powers(x.u, n);
  auto upow = [&](int g) -> const MatrixXcd& { return up[((g % n) + n) % n]; };

  TomitaBimodule ext;
  ext.name = h.name + " x Z_" + std::to_string(n);
  ext.ctx = x.ctx;
  ext.m = static_cast<Index>(n) * m;

  std::vector<std::vector<MatrixXcd>> al(n);
  for (int hh = 0; hh < n; ++hh) {
    const MatrixXcd& um = upow(-hh);
    for (Index k = 0; k < d; ++k) al[hh].push_back(h.act_l(um.col(k)));
  }

  ext.left_units.assign(x.ctx->dim, MatrixXcd());
  ext.right_units.assign(x.ctx->dim, MatrixXcd());
  for (int g = 0; g < n; ++g)
    for (Index k = 0; k < d; ++k) {
      MatrixXcd l = MatrixXcd::Zero(ext.m, ext.m);
      MatrixXcd r = MatrixXcd::Zero(ext.m, ext.m);
      for (int hh = 0; hh < n; ++hh) {
        l.block(((g + hh) % n) * m, hh * m, m, m) = al[hh][k];
        r.block(((hh + g) % n) * m, hh * m, m, m) = h.right_units[k] * wpow(-g);
      }
      ext.left_units[g * d + k] = l;
      ext.right_units[g * d + k] = r;
    }

  ext.j_conj = MatrixXcd::Zero(ext.m, ext.m);
  for (int g = 0; g < n; ++g)
    ext.j_conj.block(g * m, ((n - g) % n) * m, m, m) = wpow(-g) * h.j_conj;

  ext.gen_log_evals.resize(ext.m);
  ext.gen_evecs = MatrixXcd::Zero(ext.m, ext.m);
  for (int g = 0; g < n; ++g) {
    ext.gen_log_evals.segment(g * m, m) = h.gen_log_evals;
    ext.gen_evecs.block(g * m, g * m, m, m) = h.gen_evecs;
  }
  return ext;
}

Derivation extend_derivation(const Derivation& d, const CrossedProduct& x) {
  Derivation ext;
  ext.ctx = x.ctx;
  ext.target = extend_bimodule(x, d.target);
  ext.instance = d.instance + " x Z_" + std::to_string(x.n);
  Index dim = x.base->dim;
  Index m = d.target.m;
  ext.map = MatrixXcd::Zero(ext.target.m, x.ctx->dim);
  for (int g = 0; g < x.n; ++g)
    ext.map.block(g * m, g * dim, m, dim) = d.map;
  return ext;
}

CertificationReport check_group_commutation(const Derivation& ext,
                                            const CrossedProduct& x,
                                            int samples, std::uint64_t seed,
                                            const Tolerances& tols) {
  CertificationReport rep;
  rep.instance = ext.instance;
  rep.seed = seed;
  rep.tolerances["general"] = tols.general;

  const TomitaContext& c = *ext.ctx;
  Index d = x.base->dim;
  double scale = std::max(1.0, ext.map.norm());

  double l_basis = 0, r_basis = 0;
  std::vector<VectorXcd> group_basis;
  for (int k = 0; k < x.n; ++k) {
    VectorXcd xk = VectorXcd::Zero(c.dim);
    xk.segment(k * d, d) = x.base->unit;
    group_basis.push_back(xk);
    l_basis = std::max(l_basis, (ext.map * c.pi_l(xk) -
                                 ext.target.act_l(xk) * ext.map)
                                        .norm() /
                                    scale);
    r_basis = std::max(r_basis, (ext.map * c.pi_r(xk) -
                                 ext.target.act_r(xk) * ext.map)
                                        .norm() /
                                    scale);
  }
  rep.add("left_commutation_basis", l_basis, tols.general);
  rep.add("right_commutation_basis", r_basis, tols.general);

  SplitMix64 rng(SplitMix64::child(seed, 7));
  double l_s = 0, r_s = 0;
  for (int s = 0; s < samples; ++s) {
    VectorXcd a = rng.complex_gaussian_vector(c.dim);
    const VectorXcd& xk = group_basis[s % x.n];
    VectorXcd lhs = ext.map * c.product(xk, a);
    VectorXcd rhs = ext.target.act_l(xk) * (ext.map * a);
    l_s = std::max(l_s, (lhs - rhs).norm() / std::max(1.0, a.norm()));
    lhs = ext.map * c.product(a, xk);
    rhs = ext.target.act_r(xk) * (ext.map * a);
    r_s = std::max(r_s, (lhs - rhs).norm() / std::max(1.0, a.norm()));
  }
  rep.add("left_commutation_samples", l_s, tols.general);
  rep.add("right_commutation_samples", r_s, tols.general);
  return rep;
}

CertificationReport change_weight_harness(const FormGenerator& gen,
                                          const AlgebraElement& x, int samples,
                                          std::uint64_t seed,
                                          const Tolerances& tols,
                                          const SolverOptions& opts) {
  const MatrixRealization* mr = matrix_realization(*gen.ctx);
  if (!mr) throw ConfigError("change of weight needs a matrix realization");

  if (!x.is_hermitian(1e-10 * std::max(1.0, x.hs_norm())))
    throw PreconditionError("weight change element must be self-adjoint");
  VectorXd eig = x.hermitian_eigenvalues();
  if (eig.minCoeff() <= 1e-12)
    throw PreconditionError("weight change element must be positive invertible");

  const AlgebraElement& rho = mr->state.rho();
  double cent = (x * rho - rho * x).hs_norm() /
                std::max(1.0, x.hs_norm() * rho.hs_norm());
  if (cent > 1e-10)
    throw PreconditionError("weight change element is not in the centralizer");

  MatrixXcd lx = left_action(x);
  double comm = (gen.a * lx - lx * gen.a).norm() /
                std::max(1.0, gen.a.norm() * lx.norm());
  if (comm > tols.general)
    throw PreconditionError(
        "form does not commute with multiplication by the weight element");

  AlgebraElement rho2 = x * rho;
  rho2 = (rho2 + rho2.adjoint()) * Complex(0.5, 0);
  rho2 = rho2 * Complex(1.0 / rho2.trace().real(), 0);
  FaithfulState psi = FaithfulState::build(mr->algebra, rho2);
  ContextPtr ctx2 = make_gns_context(mr->algebra, psi, gen.ctx->name + " psi");
  FormGenerator gen2{ctx2, gen.a, gen.instance + " under psi"};

  CertificationReport rep;
  rep.instance = gen2.instance;
  rep.seed = seed;
  rep.add("centralizer_residual", cent, 1e-10);
  rep.add("form_commutation_residual", comm, tols.general);
  rep.absorb(check_dirichlet(gen2, samples, SplitMix64::child(seed, 8), tols, opts),
             "psi/");
  rep.absorb(check_modular(gen2, samples, SplitMix64::child(seed, 9), tols),
             "psi/");
  return rep;
}

namespace {

// Diagonal 0/1 projector on matrix-unit coordinates keeping entries inside
// the level's sub-blocks, plus the coordinate list it keeps.
std::pair<VectorXd, std::vector<Index>> pinch_mask(const MatrixAlgebra& alg,
                                                   const PinchingLevel& level) {
  if (static_cast<int>(level.parts.size()) != alg.num_blocks())
    throw ConfigError("pinching level has wrong number of blocks");
  VectorXd mask = VectorXd::Zero(alg.dim());
  std::vector<Index> kept;
  for (int b = 0; b < alg.num_blocks(); ++b) {
    int total = 0;
    for (int s : level.parts[b]) {
      if (s < 1) throw ConfigError("sub-block sizes must be positive");
      total += s;
    }
    if (total != alg.blocks()[b])
      throw ConfigError("sub-block sizes do not sum to the block dimension");
    int off = 0;
    for (int s : level.parts[b]) {
      for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) {
          Index idx = alg.unit_index(b, off + i, off + j);
          mask(idx) = 1;
          kept.push_back(idx);
        }
      off += s;
    }
  }
  return {mask, kept};
}

}  // namespace

CertificationReport approximation_harness(const FormGenerator& gen,
                                          const std::vector<PinchingLevel>& tower,
                                          int samples, std::uint64_t seed,
                                          const Tolerances& tols,
                                          const SolverOptions& opts,
                                          const std::vector<double>& t_grid) {
  const MatrixRealization* mr = matrix_realization(*gen.ctx);
  if (!mr) throw ConfigError("approximation harness needs a matrix realization");
  if (tower.empty()) throw ConfigError("empty tower");
  const MatrixAlgebra& alg = mr->algebra;

  CertificationReport rep;
  rep.instance = gen.instance;
  rep.seed = seed;
  rep.tolerances["general"] = tols.general;

  VectorXcd rho_vec = mr->state.rho().vec();
  Semigroup sg(gen.ctx, gen.a);

  VectorXd prev_mask;
  for (size_t lvl = 0; lvl < tower.size(); ++lvl) {
    auto [mask, kept] = pinch_mask(alg, tower[lvl]);
    std::string pre = "level" + std::to_string(lvl) + "/";

    // State preservation: rho must already be block diagonal for this level.
    double off_mass = ((VectorXd::Ones(alg.dim()) - mask).cast<Complex>()
                           .asDiagonal() *
                       rho_vec)
                          .norm();
    if (off_mass > 1e-12)
      throw ConfigError("conditional expectation does not preserve the state");

    if (lvl > 0) {
      for (Index i = 0; i < mask.size(); ++i)
        if (prev_mask(i) > 0.5 && mask(i) < 0.5)
          throw ConfigError("tower levels are not nested");
    }
    prev_mask = mask;

    MatrixXcd p = mask.cast<Complex>().asDiagonal();
    MatrixXcd pinched = p * gen.a * p;
    MatrixXcd diff = gen.a - pinched;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (diff + diff.adjoint()));
    rep.add_margin(pre + "pinched_form_dominated", -es.eigenvalues().minCoeff(),
                   tols.general);

    double t_comm = 0;
    for (double t : t_grid) {
      MatrixXcd tt = sg.gns_at(t);
      t_comm = std::max(t_comm, (tt * p - p * tt).norm() /
                                    std::max(1.0, tt.norm()));
    }
    rep.add(pre + "semigroup_commutes_with_pinching", t_comm, tols.general);

    // Compressed sub-instance.
    std::vector<int> sub_blocks;
    for (const auto& parts : tower[lvl].parts)
      for (int s : parts) sub_blocks.push_back(s);
    MatrixAlgebra sub = MatrixAlgebra::build(sub_blocks);
    MatrixXcd sel = MatrixXcd::Zero(sub.dim(), alg.dim());
    for (Index r = 0; r < static_cast<Index>(kept.size()); ++r)
      sel(r, kept[r]) = 1;
    AlgebraElement sub_rho =
        AlgebraElement::from_vec(sub, sel * rho_vec);
    FaithfulState sub_state = FaithfulState::build(sub, sub_rho);
    ContextPtr sub_ctx = make_gns_context(sub, sub_state, "tower level");
    FormGenerator sub_gen{sub_ctx, sel * gen.a * sel.adjoint(),
                          gen.instance + " level " + std::to_string(lvl)};
    rep.absorb(check_dirichlet(sub_gen, samples,
                               SplitMix64::child(seed, 20 + lvl), tols, opts),
               pre);
  }

  rep.absorb(check_dirichlet(gen, samples, SplitMix64::child(seed, 10), tols, opts),
             "full/");
  return rep;
}

}  // namespace modform
