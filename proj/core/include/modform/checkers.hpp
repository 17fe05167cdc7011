#pragma once

#include "modform/context.hpp"
#include "modform/report.hpp"

namespace modform {

/// Choi matrix of a map Phi on algebra coordinates, taken in the operator
/// picture of the context: C = sum_{ij} E_ij (x) Phi(E_ij) on
/// C^rep_dim (x) C^rep_dim, with E_ij pulled through the conditional
/// expectation onto the algebra.
MatrixXcd choi_matrix(const TomitaContext& ctx, const MatrixXcd& phi_alg);

/// Smallest eigenvalue of the trace-normalized Choi matrix.
double choi_min_eig(const MatrixXcd& c);

/// GNS symmetry of the family P_t: phi(P_t(x)* y) = phi(x* P_t(y)),
/// phi o P_t <= phi on positives, and commutation of T_t with the modular
/// flow.
CertificationReport check_gns_symmetric(
    const TomitaContext& ctx, const std::function<MatrixXcd(double)>& p_at,
    const std::vector<double>& t_grid, int samples, std::uint64_t seed,
    const Tolerances& tols = {});

/// Markov property on a time grid: complete positivity (Choi), P_t(1) <= 1,
/// and, when expect_unital is set, P_t(1) = 1. The conservative flag reports
/// whether the family is unital regardless.
struct MarkovResult {
  CertificationReport report;
  bool conservative = false;
  double max_unitality_defect = 0;
};
MarkovResult check_markov(const TomitaContext& ctx,
                          const std::function<MatrixXcd(double)>& p_at,
                          const std::vector<double>& t_grid,
                          const Tolerances& tols = {}, bool expect_unital = true);

}  // namespace modform
