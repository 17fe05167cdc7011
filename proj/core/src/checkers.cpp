#include "modform/checkers.hpp"

#include <algorithm>
#include <cmath>

namespace modform {

MatrixXcd choi_matrix(const TomitaContext& ctx, const MatrixXcd& phi_alg) {
  if (!ctx.represent || !ctx.corepresent)
    throw ConfigError("context has no operator picture for Choi matrices");
  Index n = ctx.rep_dim;
  MatrixXcd c = MatrixXcd::Zero(n * n, n * n);
  MatrixXcd e = MatrixXcd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      e(i, j) = 1;
      c.block(i * n, j * n, n, n) = ctx.represent(phi_alg * ctx.corepresent(e));
      e(i, j) = 0;
    }
  return c;
}

double choi_min_eig(const MatrixXcd& c) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (c + c.adjoint()));
  double tr = c.trace().real();
  double denom = tr > 1e-12 ? tr : std::max(1.0, c.norm());
  return es.eigenvalues().minCoeff() / denom;
}

CertificationReport check_gns_symmetric(
    const TomitaContext& ctx, const std::function<MatrixXcd(double)>& p_at,
    const std::vector<double>& t_grid, int samples, std::uint64_t seed,
    const Tolerances& tols) {
  CertificationReport rep;
  rep.instance = ctx.name;
  rep.seed = seed;
  rep.tolerances["general"] = tols.general;

  SplitMix64 rng(SplitMix64::child(seed, 6));
  double sym = 0, decrease = 0, comm = 0;
  for (double t : t_grid) {
    MatrixXcd p = p_at(t);
    MatrixXcd tt = ctx.lambda * p * ctx.lambda_inv;
    for (double s : {0.7, 1.3}) {
      MatrixXcd u = ctx.flow_matrix(Complex(s, 0));
      comm = std::max(comm, (tt * u - u * tt).norm() /
                                std::max(1.0, tt.norm() * u.norm()));
    }
    for (int s = 0; s < samples; ++s) {
      VectorXcd x = rng.complex_gaussian_vector(ctx.dim);
      VectorXcd y = rng.complex_gaussian_vector(ctx.dim);
      Complex v1 = ctx.phi(ctx.alg_product(ctx.star(p * x), y));
      Complex v2 = ctx.phi(ctx.alg_product(ctx.star(x), p * y));
      sym = std::max(sym, std::abs(v1 - v2) /
                              std::max({1.0, std::abs(v1), std::abs(v2)}));

      VectorXcd pos = ctx.alg_product(ctx.star(x), x);
      double before = ctx.phi(pos).real();
      double after = ctx.phi(p * pos).real();
      decrease = std::max(decrease, (after - before) / std::max(1.0, before));
    }
  }
  rep.add("gns_symmetry", sym, tols.general);
  rep.add_margin("state_decrease", decrease, tols.general);
  rep.add("flow_commutation", comm, tols.general);
  return rep;
}

MarkovResult check_markov(const TomitaContext& ctx,
                          const std::function<MatrixXcd(double)>& p_at,
                          const std::vector<double>& t_grid,
                          const Tolerances& tols, bool expect_unital) {
  MarkovResult out;
  CertificationReport& rep = out.report;
  rep.instance = ctx.name;
  rep.tolerances["choi"] = tols.choi;
  rep.tolerances["general"] = tols.general;

  double worst_eig = 1.0, max_defect = 0, sub_margin = 0;
  for (double t : t_grid) {
    MatrixXcd p = p_at(t);
    worst_eig = std::min(worst_eig, choi_min_eig(choi_matrix(ctx, p)));

    VectorXcd p1 = p * ctx.alg_unit;
    max_defect = std::max(max_defect, (p1 - ctx.alg_unit).norm() /
                                          std::max(1.0, ctx.alg_unit.norm()));
    MatrixXcd m = ctx.represent(p1);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (m + m.adjoint()));
    sub_margin = std::max(sub_margin, es.eigenvalues().maxCoeff() - 1.0);
  }
  rep.add_margin("choi_min_eig", -worst_eig, tols.choi);
  rep.add_margin("subunital", sub_margin, tols.general);
  if (expect_unital) rep.add("unital", max_defect, tols.general);
  out.conservative = max_defect <= tols.general;
  out.max_unitality_defect = max_defect;
  return out;
}

}  // namespace modform
