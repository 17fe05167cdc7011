#include <benchmark/benchmark.h>

#include "modform/crossed.hpp"
#include "modform/kms.hpp"

using namespace modform;

namespace {

ContextPtr random_context(int d, std::uint64_t seed, bool tracial) {
  MatrixAlgebra alg = MatrixAlgebra::build({d});
  SplitMix64 rng(seed);
  FaithfulState phi =
      tracial ? FaithfulState::tracial(alg) : FaithfulState::random(alg, rng);
  return make_gns_context(alg, phi, "bench");
}

void bm_cone_projection(benchmark::State& state) {
  bool tracial = state.range(1) != 0;
  ContextPtr ctx = random_context(static_cast<int>(state.range(0)), 17, tracial);
  SplitMix64 rng(19);
  VectorXcd xi = ctx->random_jfixed(rng);
  for (auto _ : state) {
    ConeStats stats;
    benchmark::DoNotOptimize(ctx->cone_project(xi, {}, &stats));
  }
}
BENCHMARK(bm_cone_projection)
    ->Args({2, 1})
    ->Args({2, 0})
    ->Args({4, 1})
    ->Args({4, 0})
    ->Args({8, 0});

void bm_form_assembly(benchmark::State& state) {
  ContextPtr ctx = random_context(static_cast<int>(state.range(0)), 23, false);
  SplitMix64 rng(29);
  VectorXcd xi = rng.complex_gaussian_vector(ctx->dim);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        build_form(eigen_decomposed_inner_derivation(ctx, xi)));
}
BENCHMARK(bm_form_assembly)->Arg(2)->Arg(3)->Arg(4);

FormGenerator commutator_form(const ContextPtr& ctx, std::uint64_t seed) {
  const MatrixRealization* real = matrix_realization(*ctx);
  SplitMix64 rng(seed);
  std::vector<AlgebraElement> vs{
      AlgebraElement::random_hermitian(real->algebra, rng),
      AlgebraElement::random_hermitian(real->algebra, rng)};
  return build_kms_form(ctx, vs);
}

void bm_semigroup_step(benchmark::State& state) {
  ContextPtr ctx = random_context(static_cast<int>(state.range(0)), 31, false);
  FormGenerator gen = commutator_form(ctx, 37);
  Semigroup sg(ctx, gen.a);
  double t = 0;
  for (auto _ : state) {
    t += 0.01;
    benchmark::DoNotOptimize(sg.alg_at(t));
  }
}
BENCHMARK(bm_semigroup_step)->Arg(2)->Arg(4)->Arg(8);

void bm_choi_matrix(benchmark::State& state) {
  ContextPtr ctx = random_context(static_cast<int>(state.range(0)), 41, false);
  MatrixXcd p = Semigroup(ctx, commutator_form(ctx, 43).a).alg_at(0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(choi_min_eig(choi_matrix(*ctx, p)));
}
BENCHMARK(bm_choi_matrix)->Arg(2)->Arg(4)->Arg(8);

void bm_crossed_build(benchmark::State& state) {
  MatrixAlgebra alg = MatrixAlgebra::build({2});
  std::vector<MatrixXcd> rho{(MatrixXcd(2, 2) << 0.75, 0, 0, 0.25).finished()};
  FaithfulState phi = FaithfulState::build(alg, AlgebraElement(alg, rho));
  ContextPtr base = make_gns_context(alg, phi, "bench base");
  int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_crossed_modular(base, n));
}
BENCHMARK(bm_crossed_build)->Arg(2)->Arg(3)->Arg(4);

void bm_kms_classify(benchmark::State& state) {
  KmsInstance ki =
      kms_trial_instance(static_cast<int>(state.range(0)), 2, 47, false);
  for (auto _ : state)
    benchmark::DoNotOptimize(classify_kms_form(ki.gen, 20, 53));
}
BENCHMARK(bm_kms_classify)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
