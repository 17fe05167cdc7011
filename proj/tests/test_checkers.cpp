#include "doctest.h"
#include "helpers.hpp"
#include "modform/checkers.hpp"
#include "modform/derivation.hpp"
#include "modform/dirichlet.hpp"

using namespace modform;
using test::rel;

namespace {

FormGenerator sample_form(const ContextPtr& ctx, std::uint64_t seed) {
  SplitMix64 rng(seed);
  VectorXcd xi = rng.complex_gaussian_vector(ctx->dim);
  return build_form(eigen_decomposed_inner_derivation(ctx, xi));
}

}  // namespace

TEST_CASE("Choi matrix of the identity and of the transpose") {
  MatrixAlgebra alg = MatrixAlgebra::build({2});
  FaithfulState phi = FaithfulState::tracial(alg);
  ContextPtr ctx = make_gns_context(alg, phi, "choi");

  MatrixXcd id = MatrixXcd::Identity(4, 4);
  MatrixXcd c_id = choi_matrix(*ctx, id);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(c_id);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  CHECK(choi_min_eig(c_id) > -1e-12);

  MatrixXcd t = superoperator(alg, [&alg](const AlgebraElement& x) {
    std::vector<MatrixXcd> b{x.block(0).transpose()};
    return AlgebraElement(alg, b);
  });
  CHECK(choi_min_eig(choi_matrix(*ctx, t)) < -0.4);
}

TEST_CASE("GNS symmetry checker accepts derivation semigroups") {
  for (const auto& blocks : test::standard_shapes()) {
    ContextPtr ctx = test::random_context(blocks, 173);
    FormGenerator gen = sample_form(ctx, 179);
    Semigroup sg(ctx, gen.a);
    auto p_at = [&sg](double t) { return sg.alg_at(t); };
    test::require_pass(
        check_gns_symmetric(*ctx, p_at, default_t_grid(), 50, 269));
  }
}

TEST_CASE("GNS symmetry checker rejects a non-symmetric family") {
  ContextPtr ctx = test::random_context({2}, 181);
  SplitMix64 rng(191);
  // Left multiplication by a non-central element is not GNS-symmetric.
  MatrixXcd q = ctx->lambda_inv * ctx->pi_l(rng.complex_gaussian_vector(ctx->dim)) *
                ctx->lambda;
  auto p_at = [&q, ctx](double t) {
    return MatrixXcd((1 - t * 0.1) * MatrixXcd::Identity(ctx->dim, ctx->dim) +
                     t * 0.1 * q);
  };
  CertificationReport rep =
      check_gns_symmetric(*ctx, p_at, default_t_grid(), 30, 271);
  CHECK_FALSE(rep.pass());
}

TEST_CASE("Markov checker: unital, subunital and non-CP families") {
  ContextPtr ctx = test::random_context({2}, 193);

  SUBCASE("derivation semigroup is conservative") {
    FormGenerator gen = sample_form(ctx, 197);
    Semigroup sg(ctx, gen.a);
    auto p_at = [&sg](double t) { return sg.alg_at(t); };
    MarkovResult res = check_markov(*ctx, p_at, default_t_grid(), {}, true);
    test::require_pass(res.report);
    CHECK(res.conservative);
    CHECK(res.max_unitality_defect < 1e-10);
  }

  SUBCASE("uniform decay is subunital but not unital") {
    auto p_at = [ctx](double t) {
      return MatrixXcd(std::exp(-t) *
                       MatrixXcd::Identity(ctx->dim, ctx->dim));
    };
    MarkovResult strict = check_markov(*ctx, p_at, default_t_grid(), {}, true);
    CHECK_FALSE(strict.report.pass());
    CHECK_FALSE(strict.conservative);
    MarkovResult relaxed =
        check_markov(*ctx, p_at, default_t_grid(), {}, false);
    CHECK(relaxed.report.pass());
    CHECK(relaxed.max_unitality_defect > 0.1);
  }

  SUBCASE("transpose mixing fails complete positivity") {
    MatrixAlgebra alg = MatrixAlgebra::build({2});
    FaithfulState phi = FaithfulState::tracial(alg);
    ContextPtr tctx = make_gns_context(alg, phi, "transpose");
    MatrixXcd t = superoperator(alg, [&alg](const AlgebraElement& x) {
      std::vector<MatrixXcd> b{x.block(0).transpose()};
      return AlgebraElement(alg, b);
    });
    MatrixXcd a = MatrixXcd::Identity(4, 4) - t;
    Semigroup sg(tctx, a);
    auto p_at = [&sg](double t2) { return sg.alg_at(t2); };
    MarkovResult res = check_markov(*tctx, p_at, default_t_grid(), {}, true);
    CHECK_FALSE(res.report.pass());
  }
}

TEST_CASE("report JSON round-trips") {
  CertificationReport rep;
  rep.instance = "roundtrip";
  rep.seed = 77;
  rep.tolerances["general"] = 1e-9;
  rep.add("alpha", 1e-12, 1e-9);
  rep.add_margin("beta", 2e-3, 1e-8);

  CertificationReport back = CertificationReport::from_json(rep.to_json());
  CHECK(back.instance == rep.instance);
  CHECK(back.seed == rep.seed);
  REQUIRE(back.checks.size() == 2);
  CHECK(back.checks[0].name == "alpha");
  CHECK(back.checks[0].pass);
  CHECK_FALSE(back.checks[1].pass);
  CHECK(back.checks[1].margin == rep.checks[1].margin);
}
