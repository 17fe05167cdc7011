#pragma once

#include "modform/dirichlet.hpp"

namespace modform {

/// Crossed product of a Tomita context by Z_N, acting through a state
/// preserving automorphism (the modular flow discretized at one N-th of its
/// period, or an explicit automorphism). The carrier is functions
/// Z_N -> GNS with the convolution product
///   (a * b)(g) = sum_h U_{-h} a(g - h) . b(h)
/// and involution a#(g) = U_{-g}(a(-g)#).
struct CrossedProduct {
  ContextPtr base;
  int n = 1;
  double t0 = 0;     // flow time step when the action is the modular flow
  MatrixXcd u;       // GNS unitary of the action generator, u^n = 1
  ContextPtr ctx;    // the crossed Tomita context (dimension n * base->dim)

  Index fiber(int g, Index k) const { return static_cast<Index>(g) * base->dim + k; }
};

/// Action = modular flow at t0 = period / N. Requires the flow to be
/// periodic (commensurate log Delta spectrum); otherwise ConfigError.
CrossedProduct build_crossed_modular(const ContextPtr& base, int n);

/// Action given as an automorphism matrix on algebra coordinates. Validated:
/// multiplicative, star-preserving, state-preserving, order divides N.
CrossedProduct build_crossed(const ContextPtr& base, int n,
                             const MatrixXcd& action_alg);

/// Functions Z_N -> carrier of H with the twisted actions
/// (a xi)(g) = sum_h U_{-h} a(g-h) . xi(h), (xi b)(g) = sum_h U_{-h} xi(g-h) . b(h),
/// J xi(g) = U_{-g} J xi(-g), U_z fiberwise.
TomitaBimodule extend_bimodule(const CrossedProduct& x, const TomitaBimodule& h);

/// (1 (x) delta)(a)(g) = delta(a(g)), a symmetric derivation on the crossed
/// algebra into the extended bimodule.
Derivation extend_derivation(const Derivation& d, const CrossedProduct& x);

/// delta~(x a) = x delta~(a) and delta~(a x) = delta~(a) x for x in the full
/// basis of L(Z_N) (x) 1 and random a.
CertificationReport check_group_commutation(const Derivation& ext,
                                            const CrossedProduct& x,
                                            int samples, std::uint64_t seed,
                                            const Tolerances& tols = {});

/// Change of weight (matrix contexts): for positive invertible x in the
/// centralizer with [A, L_x] = 0, the same form is Dirichlet and modular for
/// psi = phi(x^{1/2} . x^{1/2}) (density x rho renormalized). Precondition
/// violations throw PreconditionError.
CertificationReport change_weight_harness(const FormGenerator& gen,
                                          const AlgebraElement& x, int samples,
                                          std::uint64_t seed,
                                          const Tolerances& tols = {},
                                          const SolverOptions& opts = {});

/// One level of a pinching tower: each base block is cut into diagonal
/// sub-blocks of the given sizes.
struct PinchingLevel {
  std::vector<std::vector<int>> parts;
};

/// Increasing-subalgebra harness (matrix contexts): verifies that each level
/// carries a state-preserving conditional expectation, that the compressed
/// forms are Dirichlet, that E o P_n <= E, that T_t commutes with P_n, and
/// that the full form is Dirichlet.
CertificationReport approximation_harness(const FormGenerator& gen,
                                          const std::vector<PinchingLevel>& tower,
                                          int samples, std::uint64_t seed,
                                          const Tolerances& tols = {},
                                          const SolverOptions& opts = {},
                                          const std::vector<double>& t_grid =
                                              default_t_grid());

}  // namespace modform
