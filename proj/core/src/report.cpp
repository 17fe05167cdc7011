#include "modform/report.hpp"

#include <json.hpp>

namespace modform {

using nlohmann::json;

void CertificationReport::absorb(const CertificationReport& other,
                                 const std::string& prefix) {
  for (const auto& c : other.checks)
    checks.push_back({prefix + c.name, c.residual, c.margin, c.pass});
  for (const auto& [k, v] : other.tolerances) tolerances.emplace(k, v);
}

std::string CertificationReport::to_json() const {
  json j;
  j["instance"] = instance;
  j["seed"] = seed;
  j["tolerances"] = json::object();
  for (const auto& [k, v] : tolerances) j["tolerances"][k] = v;
  j["checks"] = json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"residual", c.residual},
                           {"margin", c.margin},
                           {"pass", c.pass}});
  }
  j["pass"] = pass();
  return j.dump(2);
}

CertificationReport CertificationReport::from_json(const std::string& text) {
  json j = json::parse(text);
  CertificationReport r;
  r.instance = j.at("instance").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it)
    r.tolerances[it.key()] = it.value().get<double>();
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({c.at("name").get<std::string>(),
                        c.at("residual").get<double>(),
                        c.at("margin").get<double>(), c.at("pass").get<bool>()});
  }
  return r;
}

}  // namespace modform
