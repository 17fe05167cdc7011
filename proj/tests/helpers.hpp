#pragma once

#include <string>
#include <vector>

#include "doctest.h"
#include "modform/context.hpp"
#include "modform/report.hpp"

namespace modform::test {

inline double rel(const MatrixXcd& x, const MatrixXcd& y) {
  return (x - y).norm() / std::max({1.0, x.norm(), y.norm()});
}

inline double rel(const VectorXcd& x, const VectorXcd& y) {
  return (x - y).norm() / std::max({1.0, x.norm(), y.norm()});
}

/// The shapes exercised across suites: a factor, a bigger factor and a
/// direct sum with a one-dimensional block.
inline std::vector<std::vector<int>> standard_shapes() {
  return {{2}, {3}, {1, 2}};
}

inline ContextPtr random_context(const std::vector<int>& blocks,
                                 std::uint64_t seed,
                                 const std::string& name = "test") {
  MatrixAlgebra alg = MatrixAlgebra::build(blocks);
  SplitMix64 rng(seed);
  FaithfulState phi = FaithfulState::random(alg, rng);
  return make_gns_context(alg, phi, name);
}

/// Require every check in a report to pass; on failure, surface the names.
inline void require_pass(const CertificationReport& rep) {
  for (const Check& c : rep.checks) {
    INFO(rep.instance, ": ", c.name, " residual=", c.residual,
         " margin=", c.margin);
    CHECK(c.pass);
  }
}

}  // namespace modform::test
