#include "modform/algebra.hpp"

#include <cmath>
#include <limits>

namespace modform {

MatrixAlgebra MatrixAlgebra::build(const std::vector<int>& blocks) {
  if (blocks.empty()) throw ConfigError("algebra needs at least one block");
  MatrixAlgebra a;
  a.blocks_ = blocks;
  for (int d : blocks) {
    if (d < 1) throw ConfigError("block dimensions must be positive");
    a.offsets_.push_back(a.dim_);
    a.dim_ += static_cast<Index>(d) * d;
    a.n_ += d;
  }
  return a;
}

AlgebraElement::AlgebraElement(const MatrixAlgebra& alg,
                               std::vector<MatrixXcd> blocks)
    : alg_(&alg), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != alg.num_blocks())
    throw ConfigError("block count mismatch");
  for (int b = 0; b < alg.num_blocks(); ++b) {
    if (blocks_[b].rows() != alg.blocks()[b] || blocks_[b].cols() != alg.blocks()[b])
      throw ConfigError("block shape mismatch");
  }
}

AlgebraElement AlgebraElement::zero(const MatrixAlgebra& alg) {
  std::vector<MatrixXcd> bs;
  for (int d : alg.blocks()) bs.push_back(MatrixXcd::Zero(d, d));
  return AlgebraElement(alg, std::move(bs));
}

AlgebraElement AlgebraElement::identity(const MatrixAlgebra& alg) {
  std::vector<MatrixXcd> bs;
  for (int d : alg.blocks()) bs.push_back(MatrixXcd::Identity(d, d));
  return AlgebraElement(alg, std::move(bs));
}

AlgebraElement AlgebraElement::unit(const MatrixAlgebra& alg, int b, int i, int j) {
  AlgebraElement e = zero(alg);
  e.block(b)(i, j) = 1.0;
  return e;
}

AlgebraElement AlgebraElement::from_vec(const MatrixAlgebra& alg, const VectorXcd& v) {
  if (v.size() != alg.dim()) throw ConfigError("vector length mismatch");
  AlgebraElement e = zero(alg);
  for (int b = 0; b < alg.num_blocks(); ++b) {
    int d = alg.blocks()[b];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) e.block(b)(i, j) = v(alg.unit_index(b, i, j));
  }
  return e;
}

AlgebraElement AlgebraElement::random(const MatrixAlgebra& alg, SplitMix64& rng) {
  std::vector<MatrixXcd> bs;
  for (int d : alg.blocks()) bs.push_back(rng.complex_gaussian_matrix(d, d));
  return AlgebraElement(alg, std::move(bs));
}

AlgebraElement AlgebraElement::random_hermitian(const MatrixAlgebra& alg,
                                                SplitMix64& rng) {
  std::vector<MatrixXcd> bs;
  for (int d : alg.blocks()) bs.push_back(rng.hermitian_gaussian(d));
  return AlgebraElement(alg, std::move(bs));
}

VectorXcd AlgebraElement::vec() const {
  VectorXcd v(alg_->dim());
  for (int b = 0; b < alg_->num_blocks(); ++b) {
    int d = alg_->blocks()[b];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v(alg_->unit_index(b, i, j)) = blocks_[b](i, j);
  }
  return v;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  AlgebraElement r = *this;
  for (int b = 0; b < num_blocks(); ++b) r.blocks_[b] += o.blocks_[b];
  return r;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  AlgebraElement r = *this;
  for (int b = 0; b < num_blocks(); ++b) r.blocks_[b] -= o.blocks_[b];
  return r;
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& o) const {
  AlgebraElement r = *this;
  for (int b = 0; b < num_blocks(); ++b) r.blocks_[b] = blocks_[b] * o.blocks_[b];
  return r;
}

AlgebraElement AlgebraElement::operator*(Complex c) const {
  AlgebraElement r = *this;
  for (auto& m : r.blocks_) m *= c;
  return r;
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement r = *this;
  for (auto& m : r.blocks_) m = m.adjoint().eval();
  return r;
}

double AlgebraElement::hs_norm() const {
  double s = 0;
  for (const auto& m : blocks_) s += m.squaredNorm();
  return std::sqrt(s);
}

double AlgebraElement::operator_norm() const {
  double s = 0;
  for (const auto& m : blocks_) {
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    s = std::max(s, svd.singularValues()(0));
  }
  return s;
}

Complex AlgebraElement::trace() const {
  Complex s = 0;
  for (const auto& m : blocks_) s += m.trace();
  return s;
}

bool AlgebraElement::is_hermitian(double tol) const {
  for (const auto& m : blocks_)
    if ((m - m.adjoint()).norm() > tol) return false;
  return true;
}

VectorXd AlgebraElement::hermitian_eigenvalues() const {
  std::vector<double> all;
  for (const auto& m : blocks_) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    for (Index i = 0; i < es.eigenvalues().size(); ++i)
      all.push_back(es.eigenvalues()(i));
  }
  VectorXd v(static_cast<Index>(all.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = all[i];
  return v;
}

AlgebraElement AlgebraElement::spectral_map(
    const std::function<double(double)>& f) const {
  AlgebraElement r = *this;
  for (auto& m : r.blocks_) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    VectorXd ev = es.eigenvalues();
    for (Index i = 0; i < ev.size(); ++i) ev(i) = f(ev(i));
    m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  }
  return r;
}

FaithfulState FaithfulState::build(const MatrixAlgebra& alg,
                                   const AlgebraElement& rho, double trace_tol) {
  return make(alg, rho, true, trace_tol);
}

FaithfulState FaithfulState::build_weight(const MatrixAlgebra& alg,
                                          const AlgebraElement& rho) {
  return make(alg, rho, false, 0.0);
}

FaithfulState FaithfulState::tracial(const MatrixAlgebra& alg) {
  AlgebraElement id = AlgebraElement::identity(alg);
  return build(alg, id * Complex(1.0 / static_cast<double>(alg.carrier_dim()), 0));
}

FaithfulState FaithfulState::random(const MatrixAlgebra& alg, SplitMix64& rng,
                                    double min_eig) {
  std::vector<MatrixXcd> bs;
  for (int d : alg.blocks()) {
    MatrixXcd g = rng.complex_gaussian_matrix(d, d);
    MatrixXcd w = g * g.adjoint() + min_eig * static_cast<double>(d) * MatrixXcd::Identity(d, d);
    bs.push_back(w);
  }
  AlgebraElement rho(alg, std::move(bs));
  rho = rho * Complex(1.0 / rho.trace().real(), 0);
  return build(alg, rho);
}

FaithfulState FaithfulState::make(const MatrixAlgebra& alg,
                                  const AlgebraElement& rho, bool check_trace,
                                  double trace_tol) {
  if (!rho.is_hermitian(1e-12)) throw ConfigError("density matrix must be Hermitian");
  if (check_trace && std::abs(rho.trace().real() - 1.0) > trace_tol)
    throw ConfigError("density matrix must have unit trace");

  FaithfulState s;
  s.alg_ = &alg;
  s.rho_ = rho;
  s.min_eig_ = std::numeric_limits<double>::infinity();
  s.max_eig_ = 0;
  for (int b = 0; b < alg.num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.block(b));
    s.eigs_.push_back(es.eigenvalues());
    s.vecs_.push_back(es.eigenvectors());
    s.min_eig_ = std::min(s.min_eig_, es.eigenvalues().minCoeff());
    s.max_eig_ = std::max(s.max_eig_, es.eigenvalues().maxCoeff());
  }
  if (s.min_eig_ < 1e-12)
    throw ConfigError("state is not faithful (min eigenvalue < 1e-12)");

  s.rho_half_ = rho.spectral_map([](double x) { return std::sqrt(x); });
  s.rho_quarter_ = rho.spectral_map([](double x) { return std::pow(x, 0.25); });
  s.rho_mhalf_ = rho.spectral_map([](double x) { return 1.0 / std::sqrt(x); });
  s.rho_mquarter_ = rho.spectral_map([](double x) { return std::pow(x, -0.25); });
  s.log_rho_ = rho.spectral_map([](double x) { return std::log(x); });
  return s;
}

const AlgebraElement& FaithfulState::rho_pow(double p) const {
  if (p == 0.5) return rho_half_;
  if (p == 0.25) return rho_quarter_;
  if (p == -0.5) return rho_mhalf_;
  if (p == -0.25) return rho_mquarter_;
  throw ConfigError("unsupported cached power");
}

Complex FaithfulState::value(const AlgebraElement& x) const {
  return (rho_ * x).trace();
}

MatrixXcd FaithfulState::rho_power(int b, Complex z) const {
  const VectorXd& lam = eigs_[b];
  const MatrixXcd& u = vecs_[b];
  VectorXcd p(lam.size());
  for (Index i = 0; i < lam.size(); ++i)
    p(i) = std::exp(z * std::log(lam(i)));
  return u * p.asDiagonal() * u.adjoint();
}

AlgebraElement gns_embed(const AlgebraElement& x, const FaithfulState& phi) {
  if (!(x.algebra() == phi.algebra())) throw ConfigError("algebra mismatch");
  return x * phi.rho_pow(0.5);
}

AlgebraElement gns_invert(const AlgebraElement& xi, const FaithfulState& phi) {
  return xi * phi.rho_pow(-0.5);
}

MatrixXcd left_action(const AlgebraElement& x) {
  const MatrixAlgebra& alg = x.algebra();
  MatrixXcd op = MatrixXcd::Zero(alg.dim(), alg.dim());
  for (int b = 0; b < alg.num_blocks(); ++b) {
    int d = alg.blocks()[b];
    // (x xi)_{ij} = sum_k x_{ik} xi_{kj}
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          op(alg.unit_index(b, i, j), alg.unit_index(b, k, j)) += x.block(b)(i, k);
  }
  return op;
}

MatrixXcd right_action(const AlgebraElement& x) {
  const MatrixAlgebra& alg = x.algebra();
  MatrixXcd op = MatrixXcd::Zero(alg.dim(), alg.dim());
  for (int b = 0; b < alg.num_blocks(); ++b) {
    int d = alg.blocks()[b];
    // (xi x)_{ij} = sum_k xi_{ik} x_{kj}
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          op(alg.unit_index(b, i, j), alg.unit_index(b, i, k)) += x.block(b)(k, j);
  }
  return op;
}

MatrixXcd superoperator(
    const MatrixAlgebra& alg,
    const std::function<AlgebraElement(const AlgebraElement&)>& f) {
  MatrixXcd op(alg.dim(), alg.dim());
  for (int b = 0; b < alg.num_blocks(); ++b) {
    int d = alg.blocks()[b];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        op.col(alg.unit_index(b, i, j)) = f(AlgebraElement::unit(alg, b, i, j)).vec();
  }
  return op;
}

}  // namespace modform
