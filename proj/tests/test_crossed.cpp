#include "doctest.h"
#include "helpers.hpp"
#include "modform/crossed.hpp"

using namespace modform;
using test::rel;

namespace {

ContextPtr diag_m2_context() {
  MatrixAlgebra alg = MatrixAlgebra::build({2});
  std::vector<MatrixXcd> blocks{(MatrixXcd(2, 2) << 0.75, 0, 0, 0.25).finished()};
  FaithfulState phi = FaithfulState::build(alg, AlgebraElement(alg, blocks));
  return make_gns_context(alg, phi, "m2 diag");
}

Derivation diag_m2_inner(const ContextPtr& ctx) {
  VectorXcd xi = VectorXcd::Zero(4);
  xi(1) = 1;  // E_12 in matrix-unit coordinates
  return inner_derivation(ctx, xi, std::log(3.0));
}

// Basic Tomita-algebra identities evaluated directly on a context.
void check_context_algebra(const ContextPtr& ctx, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (int s = 0; s < 10; ++s) {
    VectorXcd a = rng.complex_gaussian_vector(ctx->dim);
    VectorXcd b = rng.complex_gaussian_vector(ctx->dim);
    VectorXcd c = rng.complex_gaussian_vector(ctx->dim);

    CHECK(rel(ctx->product(ctx->product(a, b), c),
              ctx->product(a, ctx->product(b, c))) < 1e-9);
    CHECK(rel(ctx->product(ctx->unit, a), a) < 1e-10);
    CHECK(rel(ctx->product(a, ctx->unit), a) < 1e-10);
    CHECK(rel(ctx->sharp(ctx->sharp(a)), a) < 1e-9);
    CHECK(rel(ctx->sharp(ctx->product(a, b)),
              ctx->product(ctx->sharp(b), ctx->sharp(a))) < 1e-9);
    CHECK(rel(ctx->jmap(ctx->jmap(a)), a) < 1e-9);

    // Positivity of the state on x* x.
    Complex pos = ctx->phi(ctx->alg_product(ctx->star(a), a));
    CHECK(pos.real() > -1e-10);
    CHECK(std::abs(pos.imag()) < 1e-9 * std::max(1.0, pos.real()));

    // Operator picture.
    MatrixXcd ra = ctx->represent(a);
    CHECK(rel(MatrixXcd(ra * ctx->represent(b)),
              ctx->represent(ctx->alg_product(a, b))) < 1e-9);
    CHECK(rel(ctx->corepresent(ra), a) < 1e-9);
    CHECK(rel(MatrixXcd(ra.adjoint()), ctx->represent(ctx->star(a))) < 1e-9);
  }
}

}  // namespace

TEST_CASE("N = 1 crossed product reproduces the base exactly") {
  ContextPtr base = diag_m2_context();
  CrossedProduct x = build_crossed_modular(base, 1);
  CHECK(x.ctx->dim == base->dim);
  CHECK(rel(x.ctx->unit, base->unit) < 1e-14);
  CHECK(rel(x.ctx->sharp_conj, base->sharp_conj) < 1e-14);
  CHECK(rel(x.ctx->j_conj, base->j_conj) < 1e-12);
  CHECK(rel(x.ctx->star_conj, base->star_conj) < 1e-12);
  CHECK(rel(x.ctx->lambda, base->lambda) < 1e-14);
  for (Index k = 0; k < base->dim; ++k) {
    CHECK(rel(x.ctx->left_units[k], base->left_units[k]) < 1e-13);
    CHECK(rel(x.ctx->right_units[k], base->right_units[k]) < 1e-13);
  }
  CHECK(rel(x.ctx->log_delta_matrix(), base->log_delta_matrix()) < 1e-12);
}

TEST_CASE("modular Z_2 crossed product is a Tomita algebra") {
  ContextPtr base = diag_m2_context();
  CrossedProduct x = build_crossed_modular(base, 2);
  CHECK(x.ctx->dim == 8);

  // t0 is one half of the flow period 2 pi / log 3.
  CHECK(std::abs(x.t0 - std::numbers::pi / std::log(3.0)) < 1e-9);
  MatrixXcd u2 = x.u * x.u;
  CHECK(rel(u2, MatrixXcd(MatrixXcd::Identity(4, 4))) < 1e-9);

  check_context_algebra(x.ctx, 347);

  // The dual state restricts to the base state on the zero fiber.
  SplitMix64 rng(349);
  VectorXcd a0 = rng.complex_gaussian_vector(4);
  VectorXcd lifted = VectorXcd::Zero(8);
  lifted.head(4) = a0;
  CHECK(std::abs(x.ctx->phi(lifted) - base->phi(a0)) < 1e-11);

  // Fibers 0 and 1 are orthogonal in the GNS inner product.
  VectorXcd f1 = VectorXcd::Zero(8);
  f1.tail(4) = rng.complex_gaussian_vector(4);
  VectorXcd g0 = VectorXcd::Zero(8);
  g0.head(4) = rng.complex_gaussian_vector(4);
  CHECK(std::abs(VectorXcd(x.ctx->lambda * f1)
                     .dot(x.ctx->lambda * g0)) < 1e-11);
}

TEST_CASE("explicit automorphism crossed product: C (+) C by the swap is M_2") {
  MatrixAlgebra alg = MatrixAlgebra::build({1, 1});
  FaithfulState phi = FaithfulState::tracial(alg);
  ContextPtr base = make_gns_context(alg, phi, "c2");

  MatrixXcd swap(2, 2);
  swap << 0, 1, 1, 0;
  CrossedProduct x = build_crossed(base, 2, swap);
  check_context_algebra(x.ctx, 353);

  // The center of the crossed algebra is one-dimensional: commutation with
  // every basis element pins down only multiples of the unit.
  Index d = x.ctx->dim;
  MatrixXcd constraints(d * d, d);
  for (Index k = 0; k < d; ++k) {
    VectorXcd e = VectorXcd::Unit(d, k);
    MatrixXcd lk(d, d), rk(d, d);
    for (Index j = 0; j < d; ++j) {
      lk.col(j) = x.ctx->alg_product(e, VectorXcd::Unit(d, j));
      rk.col(j) = x.ctx->alg_product(VectorXcd::Unit(d, j), e);
    }
    constraints.block(k * d, 0, d, d) = lk - rk;
  }
  Eigen::FullPivLU<MatrixXcd> lu(constraints);
  lu.setThreshold(1e-9);
  CHECK(lu.dimensionOfKernel() == 1);

  // Invalid actions are rejected.
  MatrixXcd not_mult(2, 2);
  not_mult << 1, 1, 0, 1;
  CHECK_THROWS_AS(build_crossed(base, 2, not_mult), ConfigError);
  CHECK_THROWS_AS(build_crossed(base, 3, swap), ConfigError);
}

TEST_CASE("incommensurate spectra cannot be discretized") {
  MatrixAlgebra alg = MatrixAlgebra::build({3});
  std::vector<MatrixXcd> blocks{
      (MatrixXcd(3, 3) << 0.5, 0, 0, 0, 0.5 / std::numbers::sqrt2, 0, 0, 0,
       0.5 - 0.5 / std::numbers::sqrt2)
          .finished()};
  FaithfulState phi = FaithfulState::build(alg, AlgebraElement(alg, blocks));
  ContextPtr base = make_gns_context(alg, phi, "incommensurate");
  CHECK_THROWS_AS(build_crossed_modular(base, 2), ConfigError);
}

TEST_CASE("extended derivation on the Z_2 crossed M_2 instance") {
  ContextPtr base = diag_m2_context();
  Derivation d = diag_m2_inner(base);
  CrossedProduct x = build_crossed_modular(base, 2);
  Derivation ext = extend_derivation(d, x);

  test::require_pass(check_bimodule_axioms(ext.target, 40, 359));
  test::require_pass(check_derivation(ext, 60, 367));
  test::require_pass(check_adjoint_identity(ext, 100, 373));
  test::require_pass(check_group_commutation(ext, x, 200, 379));

  // Corrupting one fiber of the map breaks group commutation.
  Derivation bad = ext;
  bad.map.block(0, 0, bad.target.m / 2, 4) *= 1.01;
  CHECK_FALSE(check_group_commutation(bad, x, 50, 383).pass());

  // The extended form still certifies end to end.
  FormGenerator gen = build_form(ext);
  test::require_pass(check_dirichlet(gen, 80, 389));
  test::require_pass(check_modular(gen, 50, 397));
  test::require_pass(check_completely_dirichlet(gen, 2, 40, 401));
}

TEST_CASE("change of weight keeps the form Dirichlet and modular") {
  // Block-diagonal instance: central weights commute with everything.
  MatrixAlgebra alg = MatrixAlgebra::build({2, 2});
  SplitMix64 rng(409);
  FaithfulState phi = FaithfulState::random(alg, rng);
  ContextPtr ctx = make_gns_context(alg, phi, "two blocks");
  VectorXcd xi = rng.complex_gaussian_vector(ctx->dim);
  FormGenerator gen = build_form(eigen_decomposed_inner_derivation(ctx, xi));

  for (int trial = 0; trial < 5; ++trial) {
    double alpha = 0.5 + rng.uniform();
    double beta = 0.5 + rng.uniform();
    AlgebraElement x = AlgebraElement::zero(alg);
    x.block(0) = alpha * MatrixXcd::Identity(2, 2);
    x.block(1) = beta * MatrixXcd::Identity(2, 2);
    test::require_pass(
        change_weight_harness(gen, x, 60, 419 + trial));
  }

  // Violations: not positive, not in the centralizer, or not commuting with
  // the form.
  AlgebraElement neg = AlgebraElement::identity(alg) * Complex(-1, 0);
  CHECK_THROWS_AS(change_weight_harness(gen, neg, 10, 1), PreconditionError);

  AlgebraElement off = AlgebraElement::identity(alg);
  off.block(0) << 1.0, 0.3, 0.3, 2.0;
  CHECK_THROWS_AS(change_weight_harness(gen, off, 10, 1), PreconditionError);
}

TEST_CASE("weight change rejects x that moves the form") {
  ContextPtr ctx = diag_m2_context();
  FormGenerator gen = build_form(diag_m2_inner(ctx));
  const MatrixAlgebra& alg = matrix_realization(*ctx)->algebra;
  AlgebraElement x = AlgebraElement::identity(alg);
  x.block(0) << 1.0, 0, 0, 2.0;
  // Diagonal x commutes with rho but not with the commutator form.
  CHECK_THROWS_AS(change_weight_harness(gen, x, 10, 1), PreconditionError);
}

TEST_CASE("pinching tower harness on a diagonal-compatible instance") {
  ContextPtr ctx = diag_m2_context();
  FormGenerator gen = build_form(diag_m2_inner(ctx));

  std::vector<PinchingLevel> tower{{{{1, 1}}}, {{{2}}}};
  test::require_pass(approximation_harness(gen, tower, 60, 421));

  // A state that is not block diagonal for the level is rejected.
  MatrixAlgebra alg = MatrixAlgebra::build({2});
  std::vector<MatrixXcd> blocks{
      (MatrixXcd(2, 2) << 0.6, 0.1, 0.1, 0.4).finished()};
  FaithfulState phi = FaithfulState::build(alg, AlgebraElement(alg, blocks));
  ContextPtr ctx2 = make_gns_context(alg, phi, "off diagonal");
  SplitMix64 rng(431);
  FormGenerator gen2 =
      build_form(eigen_decomposed_inner_derivation(ctx2, rng.complex_gaussian_vector(4)));
  std::vector<PinchingLevel> diag_tower{{{{1, 1}}}};
  CHECK_THROWS_AS(approximation_harness(gen2, diag_tower, 10, 1, {}, {}),
                  ConfigError);

  // Non-nested towers are rejected.
  MatrixAlgebra alg3 = MatrixAlgebra::build({3});
  SplitMix64 rng3(433);
  FaithfulState tr3 = FaithfulState::tracial(alg3);
  ContextPtr ctx3 = make_gns_context(alg3, tr3, "m3");
  FormGenerator gen3 =
      build_form(eigen_decomposed_inner_derivation(ctx3, rng3.complex_gaussian_vector(9)));
  std::vector<PinchingLevel> bad_tower{{{{2, 1}}}, {{{1, 2}}}};
  CHECK_THROWS_AS(approximation_harness(gen3, bad_tower, 10, 1, {}, {}),
                  ConfigError);
}
