#include "modform/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modform/checkers.hpp"

namespace modform {

FormGenerator build_form(const Derivation& d) {
  MatrixXcd a = d.map.adjoint() * d.map;
  return {d.ctx, 0.5 * (a + a.adjoint()), d.instance};
}

Semigroup::Semigroup(ContextPtr ctx, const MatrixXcd& a) : ctx_(std::move(ctx)) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (a + a.adjoint()));
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

MatrixXcd Semigroup::gns_at(double t) const {
  if (t < 0) throw ConfigError("semigroup time must be nonnegative");
  VectorXd e = (-t * evals_.array()).exp();
  return evecs_ * e.cast<Complex>().asDiagonal() * evecs_.adjoint();
}

MatrixXcd Semigroup::alg_at(double t) const {
  return ctx_->lambda_inv * gns_at(t) * ctx_->lambda;
}

SemigroupSnapshot semigroup_at(const FormGenerator& gen, double t) {
  Semigroup sg(gen.ctx, gen.a);
  return {t, sg.gns_at(t), sg.alg_at(t)};
}

AlgebraElement project_cone(const AlgebraElement& xi, const FaithfulState& phi,
                            const SolverOptions& opts, ConeStats* stats) {
  if (!xi.is_hermitian(1e-10 * std::max(1.0, xi.hs_norm())))
    throw PreconditionError("cone projection requires a self-adjoint vector");

  const AlgebraElement& rq = phi.rho_pow(0.25);
  const AlgebraElement& rmq = phi.rho_pow(-0.25);
  auto clip = [](const AlgebraElement& x) {
    return x.spectral_map(
        [](double t) { return std::min(1.0, std::max(0.0, t)); });
  };
  auto embed = [&](const AlgebraElement& x) { return rq * x * rq; };
  auto objective = [&](const AlgebraElement& x) {
    return std::pow((xi - embed(x)).hs_norm(), 2);
  };
  auto gradient = [&](const AlgebraElement& x) {
    return (rq * (embed(x) - xi) * rq) * Complex(2, 0);
  };

  double step = 1.0 / (2.0 * phi.max_eig());
  AlgebraElement x = clip(rmq * xi * rmq);
  AlgebraElement x_prev = x;
  double f = objective(x);
  ConeStats st;
  st.converged = false;

  for (int it = 0; it < opts.max_iter; ++it) {
    AlgebraElement probe = x;
    if (opts.accelerated && it > 0) {
      double theta = static_cast<double>(it - 1) / (it + 2);
      probe = x + (x - x_prev) * Complex(theta, 0);
    }
    AlgebraElement next = clip(probe - gradient(probe) * Complex(step, 0));
    double f_next = objective(next);
    if (f_next > f + 1e-15 * std::max(1.0, f)) {
      if (opts.accelerated) {
        // Momentum overshoot: restart from a plain gradient step.
        next = clip(x - gradient(x) * Complex(step, 0));
        f_next = objective(next);
        if (f_next > f + 1e-15 * std::max(1.0, f)) st.monotone = false;
      } else {
        st.monotone = false;
      }
    }
    double change = (next - x).hs_norm();
    x_prev = x;
    x = next;
    f = f_next;
    st.iterations = it + 1;
    if (change < opts.tol) {
      st.converged = true;
      break;
    }
  }

  st.kkt_residual =
      (x - clip(x - gradient(x) * Complex(step, 0))).hs_norm() / step;
  if (stats) *stats = st;
  if (!st.converged && !stats) {
    std::ostringstream msg;
    msg << "cone projection did not converge in " << opts.max_iter
        << " iterations (KKT residual " << st.kkt_residual << ")";
    throw NumericError(msg.str());
  }
  return embed(x);
}

ConeGeometry cone_geometry(const TomitaContext& ctx) {
  if (!ctx.represent || !ctx.corepresent)
    throw ConfigError("context has no operator picture for cone projection");
  ConeGeometry geo;
  geo.embed = ctx.delta_pow_matrix(Complex(0.25, 0)) * ctx.lambda;
  geo.embed_inv = ctx.lambda_inv * ctx.delta_pow_matrix(Complex(-0.25, 0));
  geo.star_conj = ctx.star_conj;
  geo.represent = ctx.represent;
  geo.corepresent = ctx.corepresent;
  MatrixXcd gram = geo.embed.adjoint() * geo.embed;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (gram + gram.adjoint()));
  geo.step = 1.0 / (2.0 * es.eigenvalues().maxCoeff());
  return geo;
}

VectorXcd project_cone(const ConeGeometry& geo, const VectorXcd& xi,
                       const SolverOptions& opts, ConeStats* stats) {
  auto clip = [&](const VectorXcd& x) -> VectorXcd {
    MatrixXcd m = geo.represent(x);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (m + m.adjoint()));
    VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    return geo.corepresent(es.eigenvectors() * ev.cast<Complex>().asDiagonal() *
                           es.eigenvectors().adjoint());
  };
  auto hermitize = [&](const VectorXcd& x) -> VectorXcd {
    return 0.5 * (x + geo.star_conj * x.conjugate());
  };
  auto gradient = [&](const VectorXcd& x) -> VectorXcd {
    return hermitize(2.0 * (geo.embed.adjoint() * (geo.embed * x - xi)));
  };
  auto objective = [&](const VectorXcd& x) {
    return (xi - geo.embed * x).squaredNorm();
  };

  double step = geo.step;
  VectorXcd x = clip(hermitize(geo.embed_inv * xi));
  VectorXcd x_prev = x;
  double f = objective(x);
  ConeStats st;
  st.converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    VectorXcd probe = x;
    if (opts.accelerated && it > 0) {
      double theta = static_cast<double>(it - 1) / (it + 2);
      probe = x + theta * (x - x_prev);
    }
    VectorXcd next = clip(probe - step * gradient(probe));
    double f_next = objective(next);
    if (f_next > f + 1e-15 * std::max(1.0, f)) {
      if (opts.accelerated) {
        next = clip(x - step * gradient(x));
        f_next = objective(next);
        if (f_next > f + 1e-15 * std::max(1.0, f)) st.monotone = false;
      } else {
        st.monotone = false;
      }
    }
    double change = (next - x).norm();
    x_prev = x;
    x = next;
    f = f_next;
    st.iterations = it + 1;
    if (change < opts.tol) {
      st.converged = true;
      break;
    }
  }
  st.kkt_residual = (x - clip(x - step * gradient(x))).norm() / step;
  if (stats) *stats = st;
  if (!st.converged && !stats)
    throw NumericError("cone projection did not converge");
  return geo.embed * x;
}

void attach_generic_cone(const std::shared_ptr<TomitaContext>& ctx) {
  ConeGeometry geo = cone_geometry(*ctx);
  ctx->cone_project = [geo](const VectorXcd& xi, const SolverOptions& opts,
                            ConeStats* stats) -> VectorXcd {
    return project_cone(geo, xi, opts, stats);
  };
}

CertificationReport check_dirichlet(const FormGenerator& gen, int samples,
                                    std::uint64_t seed, const Tolerances& tols,
                                    const SolverOptions& opts) {
  CertificationReport rep;
  rep.instance = gen.instance;
  rep.seed = seed;
  rep.tolerances["dirichlet_margin"] = tols.dirichlet_margin;
  rep.tolerances["kkt"] = tols.kkt;

  const TomitaContext& c = *gen.ctx;
  {
    MatrixXcd m = (c.j_conj.adjoint() * gen.a * c.j_conj).conjugate();
    rep.add("ej_invariance",
            (m - gen.a).norm() / std::max(1.0, gen.a.norm()), tols.modular);
  }

  SplitMix64 rng(SplitMix64::child(seed, 4));
  double worst_margin = 0, worst_kkt = 0;
  int failures = 0;
  for (int s = 0; s < samples; ++s) {
    VectorXcd xi = c.random_jfixed(rng);
    ConeStats st;
    VectorXcd eta = c.cone_project(xi, opts, &st);
    if (!st.converged) {
      ++failures;
      continue;
    }
    worst_kkt = std::max(worst_kkt, st.kkt_residual);
    worst_margin = std::max(worst_margin, gen.energy(eta) - gen.energy(xi));
  }
  rep.add_margin("dirichlet_contraction", worst_margin, tols.dirichlet_margin);
  rep.add("projection_kkt", worst_kkt, tols.kkt);
  rep.add("projection_failures", static_cast<double>(failures), 0.5);
  return rep;
}

MatrixXcd amplify_form(const TomitaContext::Amplified& amp, const MatrixXcd& a,
                       int n) {
  Index nn = static_cast<Index>(n) * n;
  MatrixXcd block = kron(MatrixXcd::Identity(nn, nn), a);
  return static_cast<double>(n) * amp.layout * block * amp.layout.adjoint();
}

CertificationReport check_completely_dirichlet(
    const FormGenerator& gen, int n_max, int samples, std::uint64_t seed,
    const Tolerances& tols, const SolverOptions& opts,
    const std::vector<double>& t_grid) {
  CertificationReport rep;
  rep.instance = gen.instance;
  rep.seed = seed;
  rep.tolerances["dirichlet_margin"] = tols.dirichlet_margin;
  rep.tolerances["choi"] = tols.choi;

  bool cd_pass = true;
  for (int n = 1; n <= n_max; ++n) {
    TomitaContext::Amplified amp = gen.ctx->amplify(n);
    FormGenerator big{amp.ctx, amplify_form(amp, gen.a, n),
                      gen.instance + " (x) M_" + std::to_string(n)};
    CertificationReport sub = check_dirichlet(
        big, samples, SplitMix64::child(seed, 100 + n), tols, opts);
    cd_pass = cd_pass && sub.pass();
    rep.absorb(sub, "n=" + std::to_string(n) + "/");
  }

  double worst_eig = 0;
  if (gen.ctx->represent) {
    Semigroup sg(gen.ctx, gen.a);
    worst_eig = 1.0;
    for (double t : t_grid)
      worst_eig = std::min(worst_eig,
                           choi_min_eig(choi_matrix(*gen.ctx, sg.alg_at(t))));
    bool cp_pass = worst_eig >= -tols.choi;
    rep.add_margin("choi_min_eig", -worst_eig, tols.choi);
    rep.add_margin("verdict_agreement", cd_pass == cp_pass ? 0.0 : 1.0, 0.5);
  }
  return rep;
}

CertificationReport check_modular(const FormGenerator& gen, int samples,
                                  std::uint64_t seed, const Tolerances& tols) {
  CertificationReport rep;
  rep.instance = gen.instance;
  rep.seed = seed;
  rep.tolerances["general"] = tols.general;

  const TomitaContext& c = *gen.ctx;
  MatrixXcd h = c.log_delta_matrix();
  double comm = (gen.a * h - h * gen.a).norm() /
                std::max(1.0, gen.a.norm() * std::max(1.0, h.norm()));
  rep.add("generator_flow_commutation", comm, tols.general);

  SplitMix64 rng(SplitMix64::child(seed, 5));
  double worst = 0;
  for (double t : {0.1, 0.5, 1.3}) {
    MatrixXcd u = c.flow_matrix(Complex(t, 0));
    for (int s = 0; s < samples; ++s) {
      VectorXcd xi = rng.complex_gaussian_vector(c.dim);
      xi /= xi.norm();
      double e0 = gen.energy(xi);
      double e1 = gen.energy(u * xi);
      worst = std::max(worst, std::abs(e1 - e0) / std::max(1.0, e0));
    }
  }
  rep.add("flow_invariance", worst, tols.general);
  return rep;
}

}  // namespace modform
