#include "doctest.h"
#include "helpers.hpp"
#include "modform/checkers.hpp"
#include "modform/derivation.hpp"
#include "modform/dirichlet.hpp"

using namespace modform;
using test::rel;

namespace {

AlgebraElement random_selfadjoint(const MatrixAlgebra& alg, SplitMix64& rng) {
  AlgebraElement x = AlgebraElement::random_hermitian(alg, rng);
  return x * Complex(1.0 / x.hs_norm(), 0);
}

// Tracial oracle: C = {x/sqrt(n) : 0 <= x <= 1}, so the projection clips the
// eigenvalues of sqrt(n) xi to [0, 1] and rescales.
AlgebraElement tracial_clip(const AlgebraElement& xi, double carrier) {
  double s = std::sqrt(carrier);
  AlgebraElement scaled = xi * Complex(s, 0);
  AlgebraElement clipped = scaled.spectral_map(
      [](double t) { return std::clamp(t, 0.0, 1.0); });
  return clipped * Complex(1.0 / s, 0);
}

FormGenerator sample_form(const ContextPtr& ctx, std::uint64_t seed) {
  SplitMix64 rng(seed);
  VectorXcd xi = rng.complex_gaussian_vector(ctx->dim);
  return build_form(eigen_decomposed_inner_derivation(ctx, xi));
}

}  // namespace

TEST_CASE("tracial cone projection matches the clipping oracle") {
  for (const auto& blocks : test::standard_shapes()) {
    MatrixAlgebra alg = MatrixAlgebra::build(blocks);
    FaithfulState phi = FaithfulState::tracial(alg);
    SplitMix64 rng(109);
    for (int s = 0; s < 100; ++s) {
      AlgebraElement xi = random_selfadjoint(alg, rng);
      ConeStats stats;
      AlgebraElement p = project_cone(xi, phi, {}, &stats);
      AlgebraElement oracle =
          tracial_clip(xi, static_cast<double>(alg.carrier_dim()));
      CHECK((p - oracle).hs_norm() < 1e-8);
      CHECK(stats.converged);
    }
  }
}

TEST_CASE("non-tracial projection: KKT residual, descent, fixed points") {
  MatrixAlgebra alg = MatrixAlgebra::build({2});
  SplitMix64 rng(113);
  FaithfulState phi = FaithfulState::random(alg, rng);

  // Elements of the cone are fixed points.
  AlgebraElement q = phi.rho_pow(0.25);
  SUBCASE("interior point") {
    AlgebraElement inside = q * (AlgebraElement::identity(alg) * Complex(0.5, 0)) * q;
    ConeStats stats;
    AlgebraElement p = project_cone(inside, phi, {}, &stats);
    CHECK((p - inside).hs_norm() < 1e-8);
  }

  SUBCASE("clip at the upper bound") {
    AlgebraElement half = phi.rho_pow(0.5);
    ConeStats stats;
    AlgebraElement p = project_cone(half * Complex(2, 0), phi, {}, &stats);
    CHECK((p - half).hs_norm() < 1e-7);
  }

  SUBCASE("random targets satisfy the KKT bound and descend monotonically") {
    for (int s = 0; s < 30; ++s) {
      AlgebraElement xi = random_selfadjoint(alg, rng);
      ConeStats stats;
      project_cone(xi, phi, {}, &stats);
      CHECK(stats.converged);
      CHECK(stats.monotone);
      CHECK(stats.kkt_residual <= 1e-7);
    }
  }

  SUBCASE("non-self-adjoint input is rejected") {
    AlgebraElement e = AlgebraElement::unit(alg, 0, 0, 1);
    CHECK_THROWS_AS(project_cone(e, phi, {}, nullptr), PreconditionError);
  }
}

TEST_CASE("generic projector through the operator picture agrees") {
  ContextPtr ctx = test::random_context({2, 1}, 127);
  ConeGeometry geo = cone_geometry(*ctx);
  const MatrixRealization* mr = matrix_realization(*ctx);
  SplitMix64 rng(131);
  for (int s = 0; s < 20; ++s) {
    AlgebraElement xi = random_selfadjoint(mr->algebra, rng);
    ConeStats s1, s2;
    VectorXcd a = project_cone(geo, xi.vec(), {}, &s1);
    AlgebraElement b = project_cone(xi, mr->state, {}, &s2);
    CHECK(rel(a, b.vec()) < 1e-7);
  }
}

TEST_CASE("semigroup properties and snapshots") {
  ContextPtr ctx = test::random_context({2}, 137);
  FormGenerator gen = sample_form(ctx, 139);
  Semigroup sg(ctx, gen.a);

  CHECK(rel(sg.gns_at(0.0),
            MatrixXcd(MatrixXcd::Identity(ctx->dim, ctx->dim))) < 1e-12);
  CHECK(rel(MatrixXcd(sg.gns_at(0.3) * sg.gns_at(0.7)), sg.gns_at(1.0)) <
        1e-10);
  CHECK_THROWS_AS(sg.gns_at(-0.1), ConfigError);

  // Derivative at zero recovers -A.
  const double h = 1e-6;
  MatrixXcd fd = (sg.gns_at(h) - MatrixXcd::Identity(ctx->dim, ctx->dim)) / h;
  CHECK(rel(fd, MatrixXcd(-gen.a)) < 1e-4);

  SemigroupSnapshot snap = semigroup_at(gen, 0.5);
  CHECK(rel(snap.gns, sg.gns_at(0.5)) < 1e-12);
  CHECK(rel(snap.alg, sg.alg_at(0.5)) < 1e-12);
  CHECK(rel(MatrixXcd(ctx->lambda * snap.alg),
            MatrixXcd(snap.gns * ctx->lambda)) < 1e-10);
}

TEST_CASE("Dirichlet certification of derivation forms") {
  for (const auto& blocks : test::standard_shapes()) {
    ContextPtr ctx = test::random_context(blocks, 149);
    FormGenerator gen = sample_form(ctx, 151);
    test::require_pass(check_dirichlet(gen, 100, 239));
    test::require_pass(check_modular(gen, 50, 241));
    test::require_pass(check_completely_dirichlet(gen, 2, 60, 251));
  }
}

TEST_CASE("amplified form evaluates elementary tensors consistently") {
  ContextPtr ctx = test::random_context({2}, 157);
  FormGenerator gen = sample_form(ctx, 163);
  const int n = 2;
  TomitaContext::Amplified amp = ctx->amplify(n);
  MatrixXcd big_a = amplify_form(amp, gen.a, n);

  // On xi (x) E_ii the amplified energy is the base energy.
  SplitMix64 rng(167);
  for (int s = 0; s < 5; ++s) {
    VectorXcd xi = rng.complex_gaussian_vector(ctx->dim);
    for (int i = 0; i < n; ++i) {
      VectorXcd comp = VectorXcd::Zero(amp.ctx->dim);
      comp.segment((static_cast<Index>(i) * n + i) * ctx->dim, ctx->dim) = xi;
      VectorXcd lifted = amp.layout * comp;
      double lhs = std::real(lifted.dot(big_a * lifted));
      CHECK(std::abs(lhs - n * gen.energy(xi)) <
            1e-9 * std::max(1.0, gen.energy(xi)));
    }
  }
}

TEST_CASE("transpose flow generator is Dirichlet but not completely") {
  // On the tracial M_2 context, A = 1 - transpose generates a positive but
  // not completely positive semigroup; the Choi route must flag it.
  MatrixAlgebra alg = MatrixAlgebra::build({2});
  FaithfulState phi = FaithfulState::tracial(alg);
  ContextPtr ctx = make_gns_context(alg, phi, "transpose");

  MatrixXcd t = superoperator(alg, [&alg](const AlgebraElement& x) {
    std::vector<MatrixXcd> b{x.block(0).transpose()};
    return AlgebraElement(alg, b);
  });
  MatrixXcd a = MatrixXcd::Identity(4, 4) - t;
  FormGenerator gen{ctx, a, "transpose flow"};

  test::require_pass(check_dirichlet(gen, 100, 257));
  Semigroup sg(ctx, a);
  double worst = choi_min_eig(choi_matrix(*ctx, sg.alg_at(1.0)));
  CHECK(worst < -1e-3);
  CertificationReport rep = check_completely_dirichlet(gen, 2, 60, 263);
  CHECK_FALSE(rep.pass());
}
