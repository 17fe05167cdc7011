#pragma once

#include "modform/checkers.hpp"
#include "modform/dirichlet.hpp"

namespace modform {

/// Quadratic form A = sum_j B_j^* B_j with
///   B_j = L(rho^{1/4} v_j rho^{-1/4}) - R(rho^{-1/4} v_j rho^{1/4}),
/// the symmetric-embedding lift of the commutator map x -> [v_j, x].
/// Internally cross-checked against the trace formula
///   E(rho^{1/4} x rho^{1/4}) = sum_j || rho^{1/4} [v_j, x] rho^{1/4} ||_F^2.
FormGenerator build_kms_form(const ContextPtr& ctx,
                             const std::vector<AlgebraElement>& vs,
                             std::string instance = "kms form");

/// Diagnosis of one form: "gns_aligned" when [A, log Delta] vanishes and all
/// certification checks pass, "kms_only_pass" when the form is only
/// KMS-symmetric but the semigroup stays completely positive on the t-grid,
/// "violating" when the Choi matrix has a genuinely negative eigenvalue.
struct KmsDiagnosis {
  std::string label;
  double align_residual = 0;   // relative norm of [A, log Delta]
  double choi_min_eig = 0;     // worst trace-normalized Choi eigenvalue
  double violation = 0;        // max(0, -choi_min_eig)
  CertificationReport report;
};

KmsDiagnosis classify_kms_form(const FormGenerator& gen, int samples,
                               std::uint64_t seed, const Tolerances& tols = {},
                               const SolverOptions& opts = {},
                               const std::vector<double>& t_grid =
                                   default_t_grid());

/// One search instance rebuilt deterministically from its trial seed:
/// Wishart (or tracial) state on M_dim and GUE operators v_1..v_k.
struct KmsInstance {
  ContextPtr ctx;
  FormGenerator gen;
  std::vector<AlgebraElement> vs;
};

KmsInstance kms_trial_instance(int dim, int num_v, std::uint64_t seed,
                               bool tracial = false);

struct KmsTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  double align_residual = 0;
  double choi_min_eig = 0;
  double violation = 0;
  bool confirmed = false;      // violation survived the tighter recheck
  std::string label;
};

struct KmsScan {
  std::vector<KmsTrial> rows;        // one per trial, in trial order
  std::vector<KmsTrial> violations;  // confirmed, by decreasing magnitude
};

/// Random search over KMS-symmetric forms on the full matrix algebra M_dim:
/// Wishart state, GUE coefficient operators, counter-based per-trial seeds.
/// A trial flagged by the t-grid Choi scan is rebuilt from its seed and kept
/// only when the recomputed defect clears a ten times stricter threshold.
KmsScan kms_random_search(int dim, int num_v, int trials, std::uint64_t seed,
                          const Tolerances& tols = {},
                          const std::vector<double>& t_grid = default_t_grid(),
                          bool tracial = false);

}  // namespace modform
