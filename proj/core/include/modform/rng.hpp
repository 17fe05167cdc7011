#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "modform/types.hpp"

namespace modform {

/// Counter-based splitmix64. All randomness in the toolkit flows from one
/// root seed through `child`, so runs are reproducible bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Derive an independent stream, e.g. one per trial or per sample batch.
  static std::uint64_t child(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 s(seed ^ (0xa0761d6478bd642fULL * (index + 1)));
    return s.next();
  }

  /// Uniform in (0, 1].
  double uniform() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (no libm distribution state involved).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform();
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double theta = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Complex complex_gaussian() {
    double re = gaussian();
    double im = gaussian();
    return Complex(re, im) / std::sqrt(2.0);
  }

  VectorXcd complex_gaussian_vector(Index n) {
    VectorXcd v(n);
    for (Index i = 0; i < n; ++i) v(i) = complex_gaussian();
    return v;
  }

  MatrixXcd complex_gaussian_matrix(Index r, Index c) {
    MatrixXcd m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) m(i, j) = complex_gaussian();
    return m;
  }

  /// GUE-distributed Hermitian matrix.
  MatrixXcd hermitian_gaussian(Index n) {
    MatrixXcd g = complex_gaussian_matrix(n, n);
    return (g + g.adjoint()) / std::sqrt(2.0);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace modform
