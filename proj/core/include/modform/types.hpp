#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace modform {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Tolerance bundle shared by all certification routines.
struct Tolerances {
  double general = 1e-9;           // default residual bound for sampled identities
  double internal = 1e-12;         // exact algebraic identities
  double modular = 1e-10;          // modular-theory residuals (S = J Delta^{1/2}, ...)
  double adjoint = 1e-8;           // derivation adjoint identity
  double dirichlet_margin = 1e-8;  // E(P_C xi) <= E(xi) + margin on unit-norm samples
  double kkt = 1e-7;               // cone projection KKT residual
  double choi = 1e-10;             // min eigenvalue threshold on trace-normalized Choi
};

/// Default time grid for semigroup checks.
inline std::vector<double> default_t_grid() { return {0.01, 0.1, 0.5, 1.0, 5.0}; }

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double rel_close(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace modform
