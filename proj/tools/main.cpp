#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "modform/crossed.hpp"
#include "modform/group.hpp"
#include "modform/kms.hpp"

using json = nlohmann::json;
using namespace modform;

namespace {

Complex parse_complex(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

MatrixXcd parse_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a nested array");
  Index rows = static_cast<Index>(j.size());
  Index cols = static_cast<Index>(j[0].size());
  MatrixXcd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (static_cast<Index>(j[r].size()) != cols)
      throw ConfigError("ragged matrix rows");
    for (Index c = 0; c < cols; ++c) m(r, c) = parse_complex(j[r][c]);
  }
  return m;
}

json dump_matrix(const MatrixXcd& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

AlgebraElement parse_blocks(const MatrixAlgebra& alg, const json& j) {
  if (!j.is_array() || static_cast<int>(j.size()) != alg.num_blocks())
    throw ConfigError("expected one matrix per algebra block");
  std::vector<MatrixXcd> blocks;
  for (int b = 0; b < alg.num_blocks(); ++b) {
    MatrixXcd m = parse_matrix(j[b]);
    if (m.rows() != alg.blocks()[b] || m.cols() != alg.blocks()[b])
      throw ConfigError("block matrix has the wrong dimension");
    blocks.push_back(std::move(m));
  }
  return {alg, std::move(blocks)};
}

json dump_blocks(const AlgebraElement& x) {
  json out = json::array();
  for (int b = 0; b < x.num_blocks(); ++b) out.push_back(dump_matrix(x.block(b)));
  return out;
}

std::vector<double> parse_t_grid(const json& j) {
  std::vector<double> g = j.get<std::vector<double>>();
  if (g.empty()) throw ConfigError("empty t-grid");
  return g;
}

std::vector<double> parse_t_grid_spec(const std::string& spec) {
  double a = 0, b = 0, step = 0;
  char extra = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &a, &b, &step, &extra) != 3 ||
      step <= 0 || b < a)
    throw ConfigError("t-grid must be a:b:step with step > 0, b >= a");
  std::vector<double> g;
  for (double t = a; t <= b + 1e-12 * step; t += step) g.push_back(t);
  return g;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return cfg;
}

Tolerances parse_tolerances(const json& cfg, std::optional<double> tol_override) {
  Tolerances t;
  if (cfg.contains("tolerances")) {
    const json& j = cfg.at("tolerances");
    t.general = j.value("general", t.general);
    t.modular = j.value("modular", t.modular);
    t.adjoint = j.value("adjoint", t.adjoint);
    t.dirichlet_margin = j.value("dirichlet_margin", t.dirichlet_margin);
    t.kkt = j.value("kkt", t.kkt);
    t.choi = j.value("choi", t.choi);
  }
  if (tol_override) t.general = *tol_override;
  return t;
}

struct Instance {
  ContextPtr ctx;
  Derivation deriv;
  FormGenerator gen;
};

GroupSpec parse_group(const json& j) {
  if (j.is_string()) return GroupSpec::preset(j.get<std::string>());
  if (j.is_object() && j.contains("table"))
    return GroupSpec::build(j.at("table").get<std::vector<std::vector<int>>>());
  throw ConfigError("group must be a preset name or a multiplication table");
}

Instance build_instance(const json& cfg, std::uint64_t seed) {
  if (!cfg.contains("derivation")) throw ConfigError("missing derivation spec");
  const json& ds = cfg.at("derivation");
  std::string type = ds.at("type").get<std::string>();

  ContextPtr ctx;
  Derivation d;
  if (type == "cocycle") {
    GroupSpec g = parse_group(ds.at("group"));
    ctx = make_group_context(g, "group");
    std::string rep_name = ds.at("rep").get<std::string>();
    OrthogonalRep rep;
    if (rep_name == "rotation")
      rep = rotation_rep(g);
    else if (rep_name == "sign")
      rep = sign_rep();
    else if (rep_name == "standard_s3")
      rep = standard_rep_s3(g);
    else
      throw ConfigError("unknown representation: " + rep_name);

    Cocycle b;
    if (ds.contains("cocycle") && ds.at("cocycle").is_array()) {
      for (const json& row : ds.at("cocycle")) {
        std::vector<double> v = row.get<std::vector<double>>();
        b.b.push_back(Eigen::Map<VectorXd>(v.data(), v.size()));
      }
    } else {
      SplitMix64 rng(SplitMix64::child(seed, 0));
      b = sample_cocycle(g, rep, rng);
    }
    d = cocycle_derivation(g, rep, b, ctx);
  } else if (type == "inner" || type == "eigen_inner") {
    MatrixAlgebra alg =
        MatrixAlgebra::build(cfg.at("algebra").at("blocks").get<std::vector<int>>());
    const json& st = cfg.at("state");
    std::string st_type = st.at("type").get<std::string>();
    FaithfulState phi = [&] {
      if (st_type == "tracial") return FaithfulState::tracial(alg);
      if (st_type == "density") return FaithfulState::build(alg, parse_blocks(alg, st.at("rho")));
      if (st_type == "random") {
        SplitMix64 rng(SplitMix64::child(seed, 1));
        return FaithfulState::random(alg, rng);
      }
      throw ConfigError("unknown state type: " + st_type);
    }();
    ctx = make_gns_context(alg, phi, "config");
    AlgebraElement xi = parse_blocks(alg, ds.at("xi"));
    if (type == "inner")
      d = inner_derivation(ctx, xi.vec(), ds.at("omega").get<double>());
    else
      d = eigen_decomposed_inner_derivation(ctx, xi.vec());
  } else {
    throw ConfigError("unknown derivation type: " + type);
  }

  if (cfg.contains("crossed")) {
    const json& cs = cfg.at("crossed");
    int n = cs.at("N").get<int>();
    std::string action = cs.value("action", "modular_discretized");
    if (action != "modular_discretized")
      throw ConfigError("unsupported crossed action: " + action);
    CrossedProduct x = build_crossed_modular(ctx, n);
    d = extend_derivation(d, x);
    ctx = x.ctx;
  }

  FormGenerator gen = build_form(d);
  if (cfg.value("tamper", std::string()) == "jmap")
    d.target.j_conj(0, 0) += Complex(1e-3, 0);
  return {ctx, std::move(d), std::move(gen)};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << text;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

int cmd_check(const std::string& config_path, std::optional<double> tol,
              std::optional<std::uint64_t> seed_opt, const std::string& out) {
  json cfg = load_config(config_path);
  std::uint64_t seed = seed_opt ? *seed_opt : cfg.at("seed").get<std::uint64_t>();
  Tolerances tols = parse_tolerances(cfg, tol);
  int samples = cfg.value("samples", 200);
  int n_max = cfg.value("n_max", 2);
  bool expect_unital = cfg.value("expect_unital", true);
  std::vector<double> t_grid =
      cfg.contains("t_grid") ? parse_t_grid(cfg.at("t_grid")) : default_t_grid();

  Instance inst = build_instance(cfg, seed);

  CertificationReport rep;
  rep.instance = inst.gen.instance;
  rep.seed = seed;
  rep.tolerances["general"] = tols.general;
  rep.absorb(check_bimodule_axioms(inst.deriv.target, samples,
                                   SplitMix64::child(seed, 2), tols),
             "bimodule/");
  rep.absorb(check_derivation(inst.deriv, samples, SplitMix64::child(seed, 3), tols),
             "derivation/");
  rep.absorb(check_adjoint_identity(inst.deriv, samples,
                                    SplitMix64::child(seed, 4), tols.adjoint),
             "derivation/");
  rep.absorb(check_modular(inst.gen, samples, SplitMix64::child(seed, 5), tols), "");
  rep.absorb(check_dirichlet(inst.gen, samples, SplitMix64::child(seed, 6), tols, {}),
             "");
  rep.absorb(check_completely_dirichlet(inst.gen, n_max, samples,
                                        SplitMix64::child(seed, 7), tols, {}, t_grid),
             "complete/");
  Semigroup sg(inst.gen.ctx, inst.gen.a);
  auto p_at = [&sg](double t) { return sg.alg_at(t); };
  rep.absorb(check_gns_symmetric(*inst.ctx, p_at, t_grid, samples,
                                 SplitMix64::child(seed, 8), tols),
             "");
  rep.absorb(check_markov(*inst.ctx, p_at, t_grid, tols, expect_unital).report, "");

  write_text(out, rep.to_json() + "\n");
  return rep.pass() ? 0 : 1;
}

int cmd_semigroup(const std::string& config_path, const std::string& grid_spec,
                  const std::string& out) {
  json cfg = load_config(config_path);
  std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  std::vector<double> t_grid = !grid_spec.empty() ? parse_t_grid_spec(grid_spec)
                               : cfg.contains("t_grid")
                                   ? parse_t_grid(cfg.at("t_grid"))
                                   : default_t_grid();

  Instance inst = build_instance(cfg, seed);
  const TomitaContext& ctx = *inst.ctx;
  Semigroup sg(inst.gen.ctx, inst.gen.a);

  VectorXcd xi0;
  if (cfg.contains("xi0")) {
    const json& j = cfg.at("xi0");
    if (static_cast<Index>(j.size()) != ctx.dim)
      throw ConfigError("xi0 has the wrong dimension");
    xi0.resize(ctx.dim);
    for (Index k = 0; k < ctx.dim; ++k) xi0(k) = parse_complex(j[k]);
  } else {
    SplitMix64 rng(SplitMix64::child(seed, 11));
    xi0 = ctx.random_jfixed(rng);
  }

  SplitMix64 rng(SplitMix64::child(seed, 12));
  std::vector<std::pair<VectorXcd, VectorXcd>> pairs;
  for (int s = 0; s < 10; ++s)
    pairs.emplace_back(rng.complex_gaussian_vector(ctx.dim),
                       rng.complex_gaussian_vector(ctx.dim));

  std::ostringstream csv;
  csv << "t,min_choi_eig,unitality_defect,symmetry_residual,energy\n";
  for (double t : t_grid) {
    MatrixXcd p = sg.alg_at(t);
    double choi = choi_min_eig(choi_matrix(ctx, p));
    double unital = (p * ctx.alg_unit - ctx.alg_unit).norm();
    double sym = 0;
    for (const auto& [x, y] : pairs) {
      Complex lhs = ctx.phi(ctx.alg_product(ctx.star(p * x), y));
      Complex rhs = ctx.phi(ctx.alg_product(ctx.star(x), p * y));
      sym = std::max(sym, std::abs(lhs - rhs) /
                              std::max(1.0, x.norm() * y.norm()));
    }
    double energy = inst.gen.energy(sg.gns_at(t) * xi0);
    csv << fmt(t) << ',' << fmt(choi) << ',' << fmt(unital) << ',' << fmt(sym)
        << ',' << fmt(energy) << '\n';
  }
  write_text(out, csv.str());
  return 0;
}

int cmd_scan_kms(int dim, int num_v, int trials, std::uint64_t seed,
                 const std::string& out, bool tracial) {
  Tolerances tols;
  KmsScan scan = kms_random_search(dim, num_v, trials, seed, tols,
                                   default_t_grid(), tracial);

  std::ostringstream csv;
  csv << "trial,label,min_choi_eig,dirichlet_margin\n";
  int aligned = 0, kms_only = 0, violating = 0, confirmed = 0;
  for (const KmsTrial& row : scan.rows) {
    KmsInstance ki = kms_trial_instance(dim, num_v, row.seed, tracial);
    SplitMix64 rng(SplitMix64::child(row.seed, 900));
    double margin = 0;
    for (int s = 0; s < 2; ++s) {
      VectorXcd xi = ki.ctx->random_jfixed(rng);
      ConeStats stats;
      VectorXcd p = ki.ctx->cone_project(xi, {}, &stats);
      margin = std::max(margin, ki.gen.energy(p) - ki.gen.energy(xi));
    }
    margin = std::max(margin, 0.0);
    csv << row.trial << ',' << row.label << ',' << fmt(row.choi_min_eig) << ','
        << fmt(margin) << '\n';
    if (row.label == "gns_aligned") ++aligned;
    if (row.label == "kms_only_pass") ++kms_only;
    if (row.label == "violating") ++violating;
    if (row.confirmed) ++confirmed;
  }
  write_text(out, csv.str());

  json dump;
  dump["dim"] = dim;
  dump["num_v"] = num_v;
  dump["seed"] = seed;
  dump["tracial"] = tracial;
  dump["violations"] = json::array();
  for (const KmsTrial& row : scan.violations) {
    KmsInstance ki = kms_trial_instance(dim, num_v, row.seed, tracial);
    const MatrixRealization* mr = matrix_realization(*ki.ctx);
    json v;
    v["trial"] = row.trial;
    v["seed"] = row.seed;
    v["violation"] = row.violation;
    v["choi_min_eig"] = row.choi_min_eig;
    v["rho"] = dump_blocks(mr->state.rho());
    v["vs"] = json::array();
    for (const AlgebraElement& op : ki.vs) v["vs"].push_back(dump_blocks(op));
    dump["violations"].push_back(v);
  }
  if (!out.empty()) write_text(out + ".violations.json", dump.dump(2) + "\n");

  std::printf("trials=%d gns_aligned=%d kms_only_pass=%d violating=%d confirmed=%d\n",
              trials, aligned, kms_only, violating, confirmed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certification toolkit for modular Dirichlet forms"};
  app.require_subcommand(1);

  std::string config_path, out_path, grid_spec;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed_opt;

  CLI::App* check = app.add_subcommand("check", "Run the certification pipeline");
  check->add_option("-c,--config", config_path, "JSON config file")->required();
  double tol_val = 0;
  auto* tol_opt = check->add_option("--tol", tol_val, "Override the general tolerance");
  std::uint64_t seed_val = 0;
  auto* seed_flag = check->add_option("--seed", seed_val, "Override the config seed");
  check->add_option("-o,--output", out_path, "Report JSON path (stdout if omitted)");

  CLI::App* semi = app.add_subcommand("semigroup", "Tabulate the semigroup on a t-grid");
  semi->add_option("-c,--config", config_path, "JSON config file")->required();
  semi->add_option("--t-grid", grid_spec, "Grid a:b:step");
  semi->add_option("-o,--output", out_path, "CSV path (stdout if omitted)");

  int dim = 2, num_v = 1, trials = 10;
  std::uint64_t scan_seed = 1;
  bool tracial = false;
  CLI::App* scan = app.add_subcommand("scan-kms", "Random search over KMS-symmetric forms");
  scan->add_option("--dim", dim, "Matrix dimension")->required();
  scan->add_option("--num-v", num_v, "Operators per trial")->required();
  scan->add_option("--trials", trials, "Number of trials")->required();
  scan->add_option("--seed", scan_seed, "Master seed")->required();
  scan->add_flag("--tracial", tracial, "Use the tracial state instead of Wishart");
  scan->add_option("-o,--output", out_path, "CSV path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*check) {
      if (tol_opt->count()) tol = tol_val;
      if (seed_flag->count()) seed_opt = seed_val;
      return cmd_check(config_path, tol, seed_opt, out_path);
    }
    if (*semi) return cmd_semigroup(config_path, grid_spec, out_path);
    if (*scan) return cmd_scan_kms(dim, num_v, trials, scan_seed, out_path, tracial);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
