#include "modform/modular.hpp"

#include <algorithm>
#include <cmath>

namespace modform {

ModularData ModularData::build(const FaithfulState& phi) {
  ModularData m;
  m.phi_ = &phi;

  const MatrixAlgebra& alg = phi.algebra();
  // Collect (omega, eigenvector) pairs: omega = log lam_i - log lam_j with
  // eigenvector vec(u_i u_j^*) per block.
  struct Entry {
    double omega;
    VectorXcd v;
  };
  std::vector<Entry> entries;
  double wmin = 0, wmax = 0;
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const VectorXd& lam = phi.eigenvalues(b);
    const MatrixXcd& u = phi.eigenvectors(b);
    int d = alg.blocks()[b];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        AlgebraElement e = AlgebraElement::zero(alg);
        e.block(b) = u.col(i) * u.col(j).adjoint();
        double w = std::log(lam(i)) - std::log(lam(j));
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
        entries.push_back({w, e.vec()});
      }
  }
  m.log_spread_ = wmax - wmin;

  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.omega < b.omega; });
  const double rel_tol = 1e-10;
  for (const auto& e : entries) {
    if (!m.spaces_.empty()) {
      double w0 = m.spaces_.back().omega;
      if (std::abs(e.omega - w0) <= rel_tol * std::max({1.0, std::abs(e.omega), std::abs(w0)})) {
        m.spaces_.back().basis.push_back(e.v);
        continue;
      }
    }
    m.spaces_.push_back({e.omega, {e.v}});
  }
  return m;
}

GnsVector ModularData::delta(const GnsVector& xi) const {
  return delta_pow(Complex(1, 0), xi);
}

GnsVector ModularData::delta_pow(Complex z, const GnsVector& xi) const {
  GnsVector r = xi;
  for (int b = 0; b < algebra().num_blocks(); ++b)
    r.block(b) = phi_->rho_power(b, z) * xi.block(b) * phi_->rho_power(b, -z);
  return r;
}

GnsVector ModularData::conjugation(const GnsVector& xi) const {
  return xi.adjoint();
}

GnsVector ModularData::s_map(const GnsVector& xi) const {
  return conjugation(delta_pow(Complex(0.5, 0), xi));
}

GnsVector ModularData::flow(Complex z, const GnsVector& xi) const {
  if (std::abs(z.imag()) * log_spread_ > 700.0)
    throw NumericError("modular flow parameter out of range (exp overflow)");
  return delta_pow(kI * z, xi);
}

GnsVector ModularData::eigencomponent(const GnsVector& xi, int k) const {
  VectorXcd v = xi.vec();
  VectorXcd out = VectorXcd::Zero(v.size());
  for (const auto& e : spaces_[k].basis) out += e * (e.dot(v));
  return AlgebraElement::from_vec(algebra(), out);
}

GnsVector TomitaStructure::product(const GnsVector& a, const GnsVector& b) const {
  return a * phi->rho_pow(-0.5) * b;
}

GnsVector TomitaStructure::sharp(const GnsVector& a) const { return mod->s_map(a); }

GnsVector TomitaStructure::flat(const GnsVector& a) const {
  return mod->flow(Complex(0, -1), sharp(a));
}

}  // namespace modform
