#include "modform/context.hpp"

#include <cmath>

#include "modform/dirichlet.hpp"

namespace modform {

MatrixXcd TomitaContext::pi_l(const VectorXcd& a) const {
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k)
    if (a(k) != Complex(0)) m += a(k) * left_units[k];
  return m;
}

MatrixXcd TomitaContext::pi_r(const VectorXcd& b) const {
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k)
    if (b(k) != Complex(0)) m += b(k) * right_units[k];
  return m;
}

VectorXcd TomitaContext::product(const VectorXcd& a, const VectorXcd& b) const {
  VectorXcd r = VectorXcd::Zero(dim);
  for (Index k = 0; k < dim; ++k)
    if (a(k) != Complex(0)) r += a(k) * (left_units[k] * b);
  return r;
}

MatrixXcd TomitaContext::delta_pow_matrix(Complex z) const {
  double worst = 0;
  for (Index k = 0; k < log_delta_evals.size(); ++k)
    worst = std::max(worst, std::abs((z * log_delta_evals(k)).real()));
  if (worst > 700.0)
    throw NumericError("modular power out of range (exp overflow)");
  VectorXcd d(log_delta_evals.size());
  for (Index k = 0; k < d.size(); ++k)
    d(k) = std::exp(z * log_delta_evals(k));
  return log_delta_evecs * d.asDiagonal() * log_delta_evecs.adjoint();
}

VectorXcd TomitaContext::flow(Complex z, const VectorXcd& v) const {
  return flow_matrix(z) * v;
}

MatrixXcd TomitaContext::log_delta_matrix() const {
  return log_delta_evecs * log_delta_evals.cast<Complex>().asDiagonal() *
         log_delta_evecs.adjoint();
}

VectorXcd TomitaContext::random_jfixed(SplitMix64& rng) const {
  VectorXcd v = rng.complex_gaussian_vector(dim);
  VectorXcd w = 0.5 * (v + jmap(v));
  double n = w.norm();
  if (n < 1e-14) {
    w = 0.5 * (unit + jmap(unit));
    n = w.norm();
  }
  return w / n;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

namespace {

// Transpose permutation on matrix-unit coordinates, E_ij -> E_ji per block.
MatrixXcd transpose_perm(const MatrixAlgebra& alg) {
  MatrixXcd p = MatrixXcd::Zero(alg.dim(), alg.dim());
  for (int b = 0; b < alg.num_blocks(); ++b) {
    int d = alg.blocks()[b];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        p(alg.unit_index(b, j, i), alg.unit_index(b, i, j)) = 1;
  }
  return p;
}

}  // namespace

ContextPtr make_gns_context(const MatrixAlgebra& alg, const FaithfulState& phi,
                            std::string name) {
  return make_gns_context(alg, phi, SolverOptions{}, std::move(name));
}

ContextPtr make_gns_context(const MatrixAlgebra& alg, const FaithfulState& phi,
                            const SolverOptions& cone_opts, std::string name) {
  // The realization owns its algebra; rebind the state's cached elements to
  // that copy so the context never refers back to the caller's algebra.
  auto owned = std::make_shared<MatrixRealization>();
  owned->algebra = alg;
  owned->state = FaithfulState::build_weight(
      owned->algebra, AlgebraElement::from_vec(owned->algebra, phi.rho().vec()));
  std::shared_ptr<const MatrixRealization> real = owned;
  auto ctx = std::make_shared<TomitaContext>();
  const MatrixAlgebra& a = real->algebra;
  const FaithfulState& st = real->state;

  ctx->name = std::move(name);
  ctx->dim = a.dim();
  ctx->matrix = real;
  ctx->unit = gns_embed(AlgebraElement::identity(a), st).vec();
  ctx->alg_unit = AlgebraElement::identity(a).vec();

  ctx->left_units.reserve(ctx->dim);
  ctx->right_units.reserve(ctx->dim);
  const AlgebraElement& rh = st.rho_pow(0.5);
  const AlgebraElement& rmh = st.rho_pow(-0.5);
  for (int b = 0; b < a.num_blocks(); ++b) {
    int d = a.blocks()[b];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        AlgebraElement e = AlgebraElement::unit(a, b, i, j);
        ctx->left_units.push_back(left_action(e * rmh));
        ctx->right_units.push_back(right_action(rmh * e));
      }
  }

  MatrixXcd pt = transpose_perm(a);
  ctx->sharp_conj = left_action(rmh) * right_action(rh) * pt;
  ctx->j_conj = pt;
  ctx->star_conj = pt;

  ctx->log_delta_evals.resize(ctx->dim);
  ctx->log_delta_evecs.resize(ctx->dim, ctx->dim);
  {
    Index col = 0;
    for (int b = 0; b < a.num_blocks(); ++b) {
      const VectorXd& lam = st.eigenvalues(b);
      const MatrixXcd& u = st.eigenvectors(b);
      int d = a.blocks()[b];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          AlgebraElement e = AlgebraElement::zero(a);
          e.block(b) = u.col(i) * u.col(j).adjoint();
          ctx->log_delta_evals(col) = std::log(lam(i)) - std::log(lam(j));
          ctx->log_delta_evecs.col(col) = e.vec();
          ++col;
        }
    }
  }

  ctx->lambda = right_action(rh);
  ctx->lambda_inv = right_action(rmh);

  ctx->cone_project = [real](const VectorXcd& v, const SolverOptions& opts,
                             ConeStats* stats) -> VectorXcd {
    AlgebraElement xi = AlgebraElement::from_vec(real->algebra, v);
    return project_cone(xi, real->state, opts, stats).vec();
  };

  ctx->rep_dim = a.carrier_dim();
  ctx->represent = [real](const VectorXcd& v) -> MatrixXcd {
    AlgebraElement x = AlgebraElement::from_vec(real->algebra, v);
    Index n = real->algebra.carrier_dim();
    MatrixXcd m = MatrixXcd::Zero(n, n);
    Index off = 0;
    for (int b = 0; b < real->algebra.num_blocks(); ++b) {
      int d = real->algebra.blocks()[b];
      m.block(off, off, d, d) = x.block(b);
      off += d;
    }
    return m;
  };
  ctx->corepresent = [real](const MatrixXcd& m) -> VectorXcd {
    AlgebraElement x = AlgebraElement::zero(real->algebra);
    Index off = 0;
    for (int b = 0; b < real->algebra.num_blocks(); ++b) {
      int d = real->algebra.blocks()[b];
      x.block(b) = m.block(off, off, d, d);
      off += d;
    }
    return x.vec();
  };

  ctx->amplify = [real, cone_opts](int n) -> TomitaContext::Amplified {
    if (n < 1) throw ConfigError("amplification order must be positive");
    const MatrixAlgebra& base = real->algebra;
    std::vector<int> big_blocks;
    for (int d : base.blocks()) big_blocks.push_back(d * n);
    MatrixAlgebra big = MatrixAlgebra::build(big_blocks);
    AlgebraElement big_rho = AlgebraElement::zero(big);
    for (int b = 0; b < base.num_blocks(); ++b)
      big_rho.block(b) =
          kron(real->state.rho().block(b), MatrixXcd::Identity(n, n)) /
          static_cast<double>(n);
    FaithfulState big_state = FaithfulState::build(big, big_rho);
    ContextPtr big_ctx = make_gns_context(big, big_state, cone_opts,
                                          "amplified (x) M_" + std::to_string(n));

    // Component layout: index (i*n + j)*D + alpha for the (i,j) component in
    // base coordinate alpha = (b, p, q); the big matrix unit is
    // E_{p n + i, q n + j} in block b.
    Index d_base = base.dim();
    Index d_big = big.dim();
    MatrixXcd layout = MatrixXcd::Zero(d_big, n * n * d_base);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < base.num_blocks(); ++b) {
          int d = base.blocks()[b];
          for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) {
              Index comp = (static_cast<Index>(i) * n + j) * d_base +
                           base.unit_index(b, p, q);
              Index tgt = big.unit_index(b, p * n + i, q * n + j);
              layout(tgt, comp) = 1;
            }
        }
    return {big_ctx, layout};
  };

  return ctx;
}

std::shared_ptr<TomitaContext> amplify_generic(const ContextPtr& base, int n) {
  if (n < 1) throw ConfigError("amplification order must be positive");
  auto ctx = std::make_shared<TomitaContext>();
  Index d = base->dim;
  Index nn = static_cast<Index>(n) * n;
  Index big = nn * d;
  double s = std::sqrt(static_cast<double>(n));
  auto cell = [d, n](Index i, Index j) { return (i * n + j) * d; };

  ctx->name = base->name + " (x) M_" + std::to_string(n);
  ctx->dim = big;

  ctx->unit = VectorXcd::Zero(big);
  ctx->alg_unit = VectorXcd::Zero(big);
  for (Index i = 0; i < n; ++i) {
    ctx->unit.segment(cell(i, i), d) = base->unit / s;
    ctx->alg_unit.segment(cell(i, i), d) = base->alg_unit;
  }

  // Left action of the (i,j) component basis vector e on [b]:
  // (e.b)_{i,l} = sqrt(n) pi_l(e) b_{j,l}; right action:
  // (b.e)_{l,j} = sqrt(n) pi_r(e) b_{l,i}.
  ctx->left_units.assign(big, MatrixXcd());
  ctx->right_units.assign(big, MatrixXcd());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < d; ++k) {
        MatrixXcd l = MatrixXcd::Zero(big, big);
        MatrixXcd r = MatrixXcd::Zero(big, big);
        for (Index m = 0; m < n; ++m) {
          l.block(cell(i, m), cell(j, m), d, d) = s * base->left_units[k];
          r.block(cell(m, j), cell(m, i), d, d) = s * base->right_units[k];
        }
        ctx->left_units[cell(i, j) + k] = l;
        ctx->right_units[cell(i, j) + k] = r;
      }

  // #', J', *' move component (i,j) to (j,i) and apply the base map.
  MatrixXcd sharp = MatrixXcd::Zero(big, big);
  MatrixXcd jm = MatrixXcd::Zero(big, big);
  MatrixXcd star = MatrixXcd::Zero(big, big);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      sharp.block(cell(i, j), cell(j, i), d, d) = base->sharp_conj;
      jm.block(cell(i, j), cell(j, i), d, d) = base->j_conj;
      star.block(cell(i, j), cell(j, i), d, d) = base->star_conj;
    }
  ctx->sharp_conj = sharp;
  ctx->j_conj = jm;
  ctx->star_conj = star;

  ctx->log_delta_evals.resize(big);
  ctx->log_delta_evecs = MatrixXcd::Zero(big, big);
  for (Index c = 0; c < nn; ++c) {
    ctx->log_delta_evals.segment(c * d, d) = base->log_delta_evals;
    ctx->log_delta_evecs.block(c * d, c * d, d, d) = base->log_delta_evecs;
  }

  MatrixXcd lam = MatrixXcd::Zero(big, big);
  MatrixXcd lam_inv = MatrixXcd::Zero(big, big);
  for (Index c = 0; c < nn; ++c) {
    lam.block(c * d, c * d, d, d) = base->lambda / s;
    lam_inv.block(c * d, c * d, d, d) = base->lambda_inv * s;
  }
  ctx->lambda = lam;
  ctx->lambda_inv = lam_inv;

  // rep: block matrix with (i,j) operator entry represent(x_ij).
  Index rb = base->rep_dim;
  ctx->rep_dim = rb * n;
  auto rep_base = base->represent;
  auto corep_base = base->corepresent;
  ctx->represent = [rep_base, rb, n, d, cell](const VectorXcd& v) -> MatrixXcd {
    MatrixXcd m = MatrixXcd::Zero(rb * n, rb * n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        m.block(i * rb, j * rb, rb, rb) = rep_base(v.segment(cell(i, j), d));
    return m;
  };
  ctx->corepresent = [corep_base, rb, n, d, cell](const MatrixXcd& m) -> VectorXcd {
    VectorXcd v = VectorXcd::Zero(n * n * d);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        v.segment(cell(i, j), d) = corep_base(m.block(i * rb, j * rb, rb, rb));
    return v;
  };

  // cone_project and amplify are realization-specific; the caller fills them.
  return ctx;
}

}  // namespace modform
