#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "modform/types.hpp"

namespace modform {

/// One named check inside a certification report.
struct Check {
  std::string name;
  double residual = 0.0;  // max observed residual of the identity being checked
  double margin = 0.0;    // violation margin for order/positivity properties
  bool pass = false;
};

/// Structured pass/fail record. Serializes to the shared JSON schema
/// {instance, seed, tolerances, checks: [{name, residual, margin, pass}]}.
struct CertificationReport {
  std::string instance;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
  std::vector<Check> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  void add(const std::string& name, double residual, double tol) {
    checks.push_back({name, residual, 0.0, residual <= tol});
  }
  void add_margin(const std::string& name, double margin, double tol) {
    checks.push_back({name, 0.0, margin, margin <= tol});
  }

  /// Merge another report's checks under a prefix.
  void absorb(const CertificationReport& other, const std::string& prefix);

  std::string to_json() const;
  static CertificationReport from_json(const std::string& text);
};

}  // namespace modform
