#pragma once

#include <functional>
#include <vector>

#include "modform/rng.hpp"
#include "modform/types.hpp"

namespace modform {

/// Direct sum of full complex matrix blocks, M = ⊕_i M_{d_i}(C).
///
/// The matrix-unit basis is enumerated blocks-first, row-major within a
/// block: index = block_offset + i*d + j for E_ij. All vectorized
/// (superoperator) representations use this order.
class MatrixAlgebra {
 public:
  static MatrixAlgebra build(const std::vector<int>& blocks);

  const std::vector<int>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  Index dim() const { return dim_; }          // D = sum d_i^2
  Index carrier_dim() const { return n_; }    // n = sum d_i
  Index block_offset(int b) const { return offsets_[b]; }

  /// Basis index of E_ij in block b.
  Index unit_index(int b, int i, int j) const {
    return offsets_[b] + static_cast<Index>(i) * blocks_[b] + j;
  }

  bool operator==(const MatrixAlgebra& o) const { return blocks_ == o.blocks_; }

 private:
  std::vector<int> blocks_;
  std::vector<Index> offsets_;
  Index dim_ = 0;
  Index n_ = 0;
};

/// A block-diagonal complex matrix; element of a MatrixAlgebra or a vector
/// of its Hilbert-Schmidt (GNS) space — both live in the same coordinates.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  AlgebraElement(const MatrixAlgebra& alg, std::vector<MatrixXcd> blocks);

  static AlgebraElement zero(const MatrixAlgebra& alg);
  static AlgebraElement identity(const MatrixAlgebra& alg);
  static AlgebraElement unit(const MatrixAlgebra& alg, int b, int i, int j);
  static AlgebraElement from_vec(const MatrixAlgebra& alg, const VectorXcd& v);
  static AlgebraElement random(const MatrixAlgebra& alg, SplitMix64& rng);
  static AlgebraElement random_hermitian(const MatrixAlgebra& alg, SplitMix64& rng);

  const MatrixAlgebra& algebra() const { return *alg_; }
  const MatrixXcd& block(int b) const { return blocks_[b]; }
  MatrixXcd& block(int b) { return blocks_[b]; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }

  VectorXcd vec() const;

  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
  AlgebraElement operator*(const AlgebraElement& o) const;  // blockwise product
  AlgebraElement operator*(Complex c) const;
  AlgebraElement adjoint() const;

  double hs_norm() const;        // Hilbert-Schmidt norm
  double operator_norm() const;  // largest singular value across blocks
  Complex trace() const;
  bool is_hermitian(double tol = 1e-12) const;

  /// Eigenvalues across all blocks; requires a Hermitian element.
  VectorXd hermitian_eigenvalues() const;

  /// Apply a real scalar function to a Hermitian element via spectral calculus.
  AlgebraElement spectral_map(const std::function<double(double)>& f) const;

 private:
  const MatrixAlgebra* alg_ = nullptr;
  std::vector<MatrixXcd> blocks_;
};

inline Complex hs_inner(const AlgebraElement& a, const AlgebraElement& b) {
  Complex s = 0;
  for (int k = 0; k < a.num_blocks(); ++k)
    s += (a.block(k).adjoint() * b.block(k)).trace();
  return s;
}

/// Faithful state phi(x) = tr(rho x), rho positive definite with unit trace.
/// Caches the fractional powers of rho used throughout the modular machinery.
class FaithfulState {
 public:
  static FaithfulState build(const MatrixAlgebra& alg, const AlgebraElement& rho,
                             double trace_tol = 1e-12);
  /// rho = identity / n.
  static FaithfulState tracial(const MatrixAlgebra& alg);
  /// Random density from a normalized Wishart matrix per block.
  static FaithfulState random(const MatrixAlgebra& alg, SplitMix64& rng,
                              double min_eig = 1e-3);
  /// Internal: accepts any positive definite rho without the unit-trace check
  /// (used by matrix amplifications where a scale-covariant weight suffices).
  static FaithfulState build_weight(const MatrixAlgebra& alg,
                                    const AlgebraElement& rho);

  const MatrixAlgebra& algebra() const { return *alg_; }
  const AlgebraElement& rho() const { return rho_; }
  const AlgebraElement& rho_pow(double p) const;  // p in {0.5, 0.25, -0.5, -0.25}
  const AlgebraElement& log_rho() const { return log_rho_; }
  double min_eig() const { return min_eig_; }
  double max_eig() const { return max_eig_; }

  /// Eigendecomposition of rho in block b: rho_b = U diag(lam) U^*.
  const VectorXd& eigenvalues(int b) const { return eigs_[b]; }
  const MatrixXcd& eigenvectors(int b) const { return vecs_[b]; }

  Complex value(const AlgebraElement& x) const;  // phi(x)

  /// rho^{z} in block b for complex z.
  MatrixXcd rho_power(int b, Complex z) const;

 private:
  static FaithfulState make(const MatrixAlgebra& alg, const AlgebraElement& rho,
                            bool check_trace, double trace_tol);

  const MatrixAlgebra* alg_ = nullptr;
  AlgebraElement rho_, rho_half_, rho_quarter_, rho_mhalf_, rho_mquarter_, log_rho_;
  std::vector<VectorXd> eigs_;
  std::vector<MatrixXcd> vecs_;
  double min_eig_ = 0, max_eig_ = 0;
};

/// GNS embedding Lambda(x) = x rho^{1/2}, an isometry from (M, phi) onto
/// Hilbert-Schmidt space.
AlgebraElement gns_embed(const AlgebraElement& x, const FaithfulState& phi);
AlgebraElement gns_invert(const AlgebraElement& xi, const FaithfulState& phi);

/// Superoperators (dim x dim matrices in the matrix-unit basis).
MatrixXcd left_action(const AlgebraElement& x);
MatrixXcd right_action(const AlgebraElement& x);

/// Matrix of an arbitrary linear map on the algebra, by columns.
MatrixXcd superoperator(const MatrixAlgebra& alg,
                        const std::function<AlgebraElement(const AlgebraElement&)>& f);

}  // namespace modform
