#include "doctest.h"
#include "helpers.hpp"
#include "modform/bimodule.hpp"

using namespace modform;
using test::rel;

TEST_CASE("GNS self-bimodule satisfies the axioms") {
  for (const auto& blocks : test::standard_shapes()) {
    ContextPtr ctx = test::random_context(blocks, 47);
    TomitaBimodule h = gns_self_bimodule(ctx);
    CHECK(h.m == ctx->dim);
    test::require_pass(check_bimodule_axioms(h, 30, 101));

    // Its actions are the context's own multiplications.
    SplitMix64 rng(53);
    VectorXcd a = rng.complex_gaussian_vector(ctx->dim);
    VectorXcd xi = rng.complex_gaussian_vector(ctx->dim);
    CHECK(rel(VectorXcd(h.act_l(a) * xi), ctx->product(a, xi)) < 1e-11);
    CHECK(rel(VectorXcd(h.act_r(a) * xi), ctx->product(xi, a)) < 1e-11);
    CHECK(rel(h.jmap(xi), ctx->jmap(xi)) < 1e-12);
  }
}

TEST_CASE("doubled bimodule twists the generator by e^{-omega}, e^{omega}") {
  ContextPtr ctx = test::random_context({2}, 59);
  const double omega = 0.8;
  TomitaBimodule h = doubled_bimodule(ctx, omega);
  CHECK(h.m == 2 * ctx->dim);
  test::require_pass(check_bimodule_axioms(h, 30, 103));

  MatrixXcd gen = h.generator_matrix();
  MatrixXcd delta = ctx->delta_pow_matrix(Complex(1, 0));
  CHECK(rel(MatrixXcd(gen.topLeftCorner(ctx->dim, ctx->dim)),
            MatrixXcd(std::exp(-omega) * delta)) < 1e-10);
  CHECK(rel(MatrixXcd(gen.bottomRightCorner(ctx->dim, ctx->dim)),
            MatrixXcd(std::exp(omega) * delta)) < 1e-10);

  // Swap conjugation: J(eta, zeta) = (J zeta, J eta).
  SplitMix64 rng(61);
  VectorXcd xi = rng.complex_gaussian_vector(h.m);
  VectorXcd jx = h.jmap(xi);
  CHECK(rel(VectorXcd(jx.head(ctx->dim)),
            ctx->jmap(xi.tail(ctx->dim))) < 1e-12);
  CHECK(rel(VectorXcd(jx.tail(ctx->dim)),
            ctx->jmap(xi.head(ctx->dim))) < 1e-12);
}

TEST_CASE("adjoint pairing holds against a brute-force inner product") {
  ContextPtr ctx = test::random_context({2, 1}, 67);
  TomitaBimodule h = doubled_bimodule(ctx, -0.4);
  SplitMix64 rng(71);
  for (int s = 0; s < 20; ++s) {
    VectorXcd a = rng.complex_gaussian_vector(ctx->dim);
    VectorXcd b = rng.complex_gaussian_vector(ctx->dim);
    VectorXcd xi = rng.complex_gaussian_vector(h.m);
    VectorXcd eta = rng.complex_gaussian_vector(h.m);
    Complex lhs = VectorXcd(h.act_l(a) * (h.act_r(b) * xi)).dot(eta);
    Complex rhs =
        xi.dot(h.act_l(ctx->sharp(a)) * (h.act_r(ctx->flat(b)) * eta));
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("direct sums stay Tomita bimodules componentwise") {
  ContextPtr ctx = test::random_context({2}, 73);
  TomitaBimodule h =
      direct_sum({doubled_bimodule(ctx, 0.3), doubled_bimodule(ctx, -1.1)});
  CHECK(h.m == 4 * ctx->dim);
  test::require_pass(check_bimodule_axioms(h, 30, 107));
}

TEST_CASE("axiom checker flags a corrupted conjugation") {
  ContextPtr ctx = test::random_context({2}, 79);
  TomitaBimodule h = gns_self_bimodule(ctx);
  h.j_conj(0, 0) += Complex(5e-3, 0);
  CertificationReport rep = check_bimodule_axioms(h, 20, 109);
  CHECK_FALSE(rep.pass());
}
