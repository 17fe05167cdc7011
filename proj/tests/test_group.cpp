#include "doctest.h"
#include "helpers.hpp"
#include "modform/dirichlet.hpp"
#include "modform/group.hpp"

using namespace modform;
using test::rel;

TEST_CASE("group specs validate their tables") {
  GroupSpec z4 = GroupSpec::cyclic(4);
  CHECK(z4.order() == 4);
  CHECK(z4.mul(3, 2) == 1);
  CHECK(z4.inv(1) == 3);
  CHECK(z4.identity() == 0);

  GroupSpec s3 = GroupSpec::symmetric3();
  CHECK(s3.order() == 6);
  for (int g = 0; g < 6; ++g) CHECK(s3.mul(g, s3.inv(g)) == s3.identity());

  CHECK(GroupSpec::preset("cyclic:3").order() == 3);
  CHECK(GroupSpec::preset("sym:3").order() == 6);
  CHECK_THROWS_AS(GroupSpec::preset("dihedral:4"), ConfigError);

  // Non-associative table.
  std::vector<std::vector<int>> bad{{0, 1}, {1, 1}};
  CHECK_THROWS_AS(GroupSpec::build(bad), ConfigError);
}

TEST_CASE("bundled representations are orthogonal") {
  GroupSpec z3 = GroupSpec::cyclic(3);
  test::require_pass(check_orthogonal_rep(z3, rotation_rep(z3)));
  GroupSpec z2 = GroupSpec::cyclic(2);
  test::require_pass(check_orthogonal_rep(z2, sign_rep()));
  GroupSpec s3 = GroupSpec::symmetric3();
  test::require_pass(check_orthogonal_rep(s3, standard_rep_s3(s3)));

  OrthogonalRep broken = rotation_rep(z3);
  broken.mats[1](0, 0) += 0.01;
  CHECK_FALSE(check_orthogonal_rep(z3, broken).pass());
}

TEST_CASE("sampled cocycles satisfy the cocycle identity") {
  struct Case {
    GroupSpec g;
    OrthogonalRep pi;
  };
  GroupSpec z2 = GroupSpec::cyclic(2);
  GroupSpec z3 = GroupSpec::cyclic(3);
  GroupSpec s3 = GroupSpec::symmetric3();
  std::vector<Case> cases{{z2, sign_rep()},
                          {z3, rotation_rep(z3)},
                          {s3, standard_rep_s3(s3)}};
  for (auto& c : cases) {
    SplitMix64 rng(277);
    Cocycle b = sample_cocycle(c.g, c.pi, rng);
    test::require_pass(check_cocycle(b, c.pi, c.g));
    CHECK(b.b[c.g.identity()].norm() < 1e-12);

    VectorXd psi = cocycle_psi(b);
    CHECK(psi(c.g.identity()) < 1e-12);
    test::require_pass(cnd_check(c.g, psi));
  }
}

TEST_CASE("cnd check rejects a positive definite function") {
  GroupSpec z3 = GroupSpec::cyclic(3);
  VectorXd bad(3);
  bad << 0.0, -1.0, -1.0;
  CHECK_FALSE(cnd_check(z3, bad).pass());
}

TEST_CASE("group context is the tracial convolution algebra") {
  GroupSpec s3 = GroupSpec::symmetric3();
  ContextPtr ctx = make_group_context(s3, "s3");
  CHECK(ctx->dim == 6);

  // tau picks the identity coefficient.
  SplitMix64 rng(281);
  VectorXcd f = rng.complex_gaussian_vector(6);
  CHECK(std::abs(ctx->phi(f) - f(s3.identity())) < 1e-12);

  // Convolution oracle.
  VectorXcd g = rng.complex_gaussian_vector(6);
  VectorXcd conv = VectorXcd::Zero(6);
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y) conv(s3.mul(x, y)) += f(x) * g(y);
  CHECK(rel(ctx->alg_product(f, g), conv) < 1e-11);

  // star: coefficients conjugated along inversion.
  VectorXcd st = ctx->star(f);
  for (int x = 0; x < 6; ++x)
    CHECK(std::abs(st(x) - std::conj(f(s3.inv(x)))) < 1e-12);

  // Tracial modular structure.
  CHECK(ctx->log_delta_spread() < 1e-12);

  // Operator picture is multiplicative with a left inverse.
  MatrixXcd rf = ctx->represent(f);
  CHECK(rel(MatrixXcd(rf * ctx->represent(g)), ctx->represent(conv)) < 1e-10);
  CHECK(rel(ctx->corepresent(rf), f) < 1e-11);
  CHECK(rel(MatrixXcd(rf.adjoint()), ctx->represent(st)) < 1e-11);
}

TEST_CASE("group bimodule and cocycle derivation certify") {
  GroupSpec s3 = GroupSpec::symmetric3();
  OrthogonalRep pi = standard_rep_s3(s3);
  ContextPtr ctx = make_group_context(s3, "s3");
  TomitaBimodule h = group_bimodule(s3, pi, ctx);
  CHECK(h.m == 6 * 2);
  test::require_pass(check_bimodule_axioms(h, 40, 283));

  SplitMix64 rng(293);
  Cocycle b = sample_cocycle(s3, pi, rng);
  Derivation d = cocycle_derivation(s3, pi, b, ctx);
  test::require_pass(check_derivation(d, 60, 307));
  test::require_pass(check_adjoint_identity(d, 100, 311));

  // delta(lambda_g) = lambda_g (x) b(g).
  for (int g = 0; g < 6; ++g) {
    VectorXcd out = d.apply(VectorXcd::Unit(6, g));
    for (int x = 0; x < 6; ++x)
      for (int k = 0; k < 2; ++k) {
        Complex expect = (x == g) ? Complex(b.b[g](k), 0) : Complex(0, 0);
        CHECK(std::abs(out(2 * x + k) - expect) < 1e-12);
      }
  }
}

TEST_CASE("multiplier semigroup equals the derivation semigroup") {
  GroupSpec z3 = GroupSpec::cyclic(3);
  OrthogonalRep pi = rotation_rep(z3);
  ContextPtr ctx = make_group_context(z3, "z3");
  SplitMix64 rng(313);
  Cocycle b = sample_cocycle(z3, pi, rng);
  Derivation d = cocycle_derivation(z3, pi, b, ctx);
  FormGenerator gen = build_form(d);
  Semigroup sg(ctx, gen.a);

  VectorXd psi = cocycle_psi(b);
  for (double t : default_t_grid())
    CHECK(rel(sg.alg_at(t), multiplier_semigroup(psi, t)) < 1e-10);
  CHECK_THROWS_AS(multiplier_semigroup(psi, -1.0), ConfigError);

  // Generator spectrum is exactly {psi(g)}.
  VectorXd evals = sg.eigenvalues();
  VectorXd sorted_psi = psi;
  std::sort(sorted_psi.data(), sorted_psi.data() + sorted_psi.size());
  VectorXd sorted_ev = evals;
  std::sort(sorted_ev.data(), sorted_ev.data() + sorted_ev.size());
  CHECK((sorted_ev - sorted_psi).cwiseAbs().maxCoeff() < 1e-10);

  test::require_pass(check_dirichlet(gen, 100, 317));
  test::require_pass(check_completely_dirichlet(gen, 2, 50, 331));
}

TEST_CASE("group cone projection is exact spectral clipping") {
  GroupSpec z3 = GroupSpec::cyclic(3);
  ContextPtr ctx = make_group_context(z3, "z3");
  ConeGeometry geo = cone_geometry(*ctx);
  SplitMix64 rng(337);
  for (int s = 0; s < 20; ++s) {
    VectorXcd xi = ctx->random_jfixed(rng);
    ConeStats stats;
    VectorXcd p = ctx->cone_project(xi, {}, &stats);
    CHECK(stats.converged);
    // Oracle: clip the spectrum of the represented operator to [0, 1].
    MatrixXcd op = geo.represent(VectorXcd(geo.embed_inv * xi));
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (op + op.adjoint()));
    VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    MatrixXcd clipped =
        es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    VectorXcd oracle = geo.embed * geo.corepresent(clipped);
    CHECK(rel(p, oracle) < 1e-8);
  }
}
