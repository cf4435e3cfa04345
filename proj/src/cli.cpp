#include "mfbog/cli.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfbog/bogoliubov.h"
#include "mfbog/experiments.h"
#include "mfbog/expm.h"
#include "mfbog/fock.h"
#include "mfbog/operators.h"
#include "mfbog/solver.h"

namespace mfbog {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json num_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string label_text(const Label& n) {
  std::string out;
  for (std::size_t k = 0; k < n.size(); ++k) out += (k ? ";" : "") + std::to_string(n[k]);
  return out;
}

RunConfig standard_config() {
  const std::string text = R"({
    "dimension": 1, "n_max": 2,
    "w_hat": [[0, 5.0], [1, 5.0], [2, 5.0]],
    "N": 10, "excitation_cutoff": 10
  })";
  return parse_config(text, "<standard>");
}

struct Options {
  std::string config_path;
  std::string out_dir;
  bool json = false;
  int workers = 0;
  std::optional<long long> seed;
  // fit only
  std::string csv_path;
  std::string column;
  bool top_half_only = false;
};

// Writes to OUT/name when an output directory is set, else to the stream.
class Sink {
 public:
  Sink(const Options& opt, std::ostream& out) : opt_(opt), out_(out) {}

  void emit(const std::string& name, const std::string& content) {
    if (opt_.out_dir.empty()) {
      out_ << content;
      return;
    }
    fs::create_directories(opt_.out_dir);
    const fs::path path = fs::path(opt_.out_dir) / name;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << content;
    written_.push_back(path.string());
  }

  void manifest(const std::string& command, const std::optional<RunConfig>& config) {
    if (opt_.out_dir.empty()) return;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json m = {{"tool", "mfbog"},
              {"version", kToolVersion},
              {"command", command},
              {"timestamp", stamp},
              {"outputs", written_}};
    if (config) {
      m["config"] = json::parse(config_to_json(*config));
      m["seed"] = config->model.rng_seed;
    }
    if (!opt_.config_path.empty()) m["config_path"] = opt_.config_path;
    if (!opt_.csv_path.empty()) m["csv_path"] = opt_.csv_path;
    const fs::path path = fs::path(opt_.out_dir) / "manifest.json";
    std::ofstream file(path, std::ios::binary);
    file << m.dump(2) << '\n';
  }

 private:
  const Options& opt_;
  std::ostream& out_;
  std::vector<std::string> written_;
};

RunConfig resolve_config(const Options& opt) {
  RunConfig config = opt.config_path.empty() ? standard_config() : load_config(opt.config_path);
  if (opt.seed) {
    if (*opt.seed < 0) throw ConfigError("--seed must be nonnegative");
    config.model.rng_seed = static_cast<std::uint64_t>(*opt.seed);
  }
  return config;
}

int cmd_predict(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt);
  const ModelConfig& m = config.model;
  const BogoliubovData bog = coefficients(m.potential, m.modes);
  const DensityMatrixPrediction dm = predicted_density_matrix(bog, m.particles);

  std::ostringstream csv;
  csv << "n,p2,w_hat,alpha,beta,sigma,gamma,e,dm_weight\n";
  json rows = json::array();
  for (std::size_t i = 0; i < m.modes.size(); ++i) {
    const ModeCoefficients& c = bog[i];
    csv << label_text(m.modes.label(i)) << ',' << num(m.modes.momentum_squared(i)) << ','
        << num(m.potential[i]) << ',' << num(c.alpha) << ',' << num(c.beta) << ','
        << num(c.sigma) << ',' << num(c.gamma) << ',' << num(c.dispersion) << ','
        << num(dm.weights[i]) << '\n';
    rows.push_back({{"n", m.modes.label(i)},
                    {"p2", m.modes.momentum_squared(i)},
                    {"w_hat", m.potential[i]},
                    {"alpha", c.alpha},
                    {"beta", c.beta},
                    {"sigma", c.sigma},
                    {"gamma", c.gamma},
                    {"e", c.dispersion},
                    {"dm_weight", dm.weights[i]}});
  }
  csv << "E_Bog," << num(bog.energy()) << ",,,,,,,\n";
  csv << "depletion," << num(bog.depletion()) << ",,,,,,,\n";
  csv << "dm_trace," << num(dm.trace) << ",,,,,,,\n";

  Sink sink(opt, out);
  sink.emit("predict.csv", csv.str());
  if (opt.json) {
    const json j = {{"modes", rows},
                    {"E_Bog", bog.energy()},
                    {"depletion", bog.depletion()},
                    {"N", m.particles},
                    {"dm_trace", dm.trace},
                    {"regime_valid", dm.regime_valid}};
    sink.emit("predict.json", j.dump(2) + "\n");
  }
  sink.manifest("predict", config);
  return kExitOk;
}

int cmd_exact(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt);
  std::ostringstream summary;
  std::ostringstream density;
  summary << "N,E_exact,residual,depletion,m1,m2,m3,m4\n";
  density << "N,n,gamma_diag\n";
  json rows = json::array();
  for (int n : config.particle_list) {
    ModelConfig m = config.model;
    m.particles = n;
    const BasisPtr basis = enumerate_canonical(m.modes, n, !m.full_space);
    if (basis->empty()) throw ConfigError("empty canonical sector for N = " + std::to_string(n));
    const GroundState gs = ground_state(build_HN(m, basis), m.eigensolver_tol, m.rng_seed);
    const Eigen::MatrixXd gamma = one_body_density_matrix(gs);
    const auto zero = static_cast<Eigen::Index>(m.modes.zero_index());
    const double depletion = n - gamma(zero, zero);
    double moments[4];
    for (int s = 1; s <= 4; ++s) moments[s - 1] = expectation_moment(gs, s);
    summary << n << ',' << num(gs.energy) << ',' << num(gs.residual) << ',' << num(depletion);
    for (double x : moments) summary << ',' << num(x);
    summary << '\n';
    std::vector<double> diag;
    for (std::size_t i = 0; i < m.modes.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      density << n << ',' << label_text(m.modes.label(i)) << ',' << num(gamma(k, k)) << '\n';
      diag.push_back(gamma(k, k));
    }
    rows.push_back({{"N", n},
                    {"E_exact", gs.energy},
                    {"residual", gs.residual},
                    {"depletion", depletion},
                    {"moments", moments},
                    {"gamma_diag", diag}});
  }
  Sink sink(opt, out);
  sink.emit("exact.csv", summary.str());
  sink.emit("density.csv", density.str());
  if (opt.json) sink.emit("exact.json", json(rows).dump(2) + "\n");
  sink.manifest("exact", config);
  return kExitOk;
}

json fit_json(const std::vector<ScanRow>& rows, const std::string& column) {
  try {
    const PowerLawFit fit = fit_power_law(column_pairs(rows, column));
    return {{"exponent", fit.exponent}, {"amplitude", fit.amplitude}, {"r_squared", fit.r_squared}};
  } catch (const std::invalid_argument& e) {
    return {{"error", e.what()}};
  }
}

json rows_json(const std::vector<ScanRow>& rows) {
  json out = json::array();
  for (const ScanRow& row : rows) {
    json j;
    for (const std::string& c : scan_columns()) {
      j[c] = c == "N" ? json(row.N) : num_json(scan_value(row, c));
    }
    if (!row.ok()) j["error"] = row.error;
    out.push_back(j);
  }
  return out;
}

int cmd_scan(const Options& opt, std::ostream& out, std::ostream& err) {
  const RunConfig config = resolve_config(opt);
  const std::vector<ScanRow> rows =
      run_scan(config.model, config.particle_list, resolve_workers(opt.workers));
  std::ostringstream csv;
  write_scan_csv(csv, rows);

  const std::vector<ScanRow> upper = top_half(rows);
  json summary = {{"points", rows.size()}, {"top_half_from_N", upper.front().N}};
  for (const char* column : {"gap_level1", "gap_level2", "phi_number", "norm_gap",
                             "dm_trace_dist", "depletion_gap"}) {
    summary["fits_top_half"][column] = fit_json(upper, column);
  }
  if (rows.size() >= 3) {
    const MomentReport report = moment_boundedness(rows);
    json bounds = json::array();
    for (const MomentBound& b : report.bounds) {
      bounds.push_back({{"s", b.s}, {"max", b.max}, {"min", b.min}, {"ratio", num_json(b.ratio)}});
    }
    summary["moments"] = {{"bounds", bounds}, {"passed", report.passed}};
  }
  json cutoff = json::array();
  for (const CutoffRow& c : cutoff_convergence(config.model, config.cutoff_list)) {
    cutoff.push_back({{"M", c.M},
                      {"dimension", c.dimension},
                      {"vacuum_expectation", c.vacuum_expectation},
                      {"gap", c.gap},
                      {"residual", c.residual}});
  }
  summary["cutoff_convergence"] = cutoff;
  json failures = json::array();
  bool flagged = false;
  for (const ScanRow& row : rows) {
    if (!row.ok()) failures.push_back({{"N", row.N}, {"error", row.error}});
    flagged = flagged || row.tail_flagged;
  }
  summary["failures"] = failures;
  summary["tail_flagged"] = flagged;

  Sink sink(opt, out);
  sink.emit("scan.csv", csv.str());
  if (!opt.out_dir.empty()) sink.emit("scan_summary.json", summary.dump(2) + "\n");
  if (opt.json) sink.emit("scan.json", rows_json(rows).dump(2) + "\n");
  sink.manifest("scan", config);
  for (const ScanRow& row : rows) {
    if (!row.ok()) err << "scan: N = " << row.N << " failed: " << row.error << '\n';
  }
  return failures.empty() ? kExitOk : kExitSolver;
}

int cmd_fit(const Options& opt, std::ostream& out) {
  std::ifstream in(opt.csv_path);
  if (!in) throw ConfigError(opt.csv_path + ": cannot open CSV");
  std::vector<ScanRow> rows;
  try {
    rows = read_scan_csv(in);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(opt.csv_path + ": " + e.what());
  }
  if (opt.top_half_only) rows = top_half(rows);
  std::vector<std::pair<double, double>> pairs;
  try {
    pairs = column_pairs(rows, opt.column);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const PowerLawFit fit = fit_power_law(pairs);
  std::ostringstream text;
  text << "column,points,exponent,amplitude,r_squared\n"
       << opt.column << ',' << fit.points.size() << ',' << num(fit.exponent) << ','
       << num(fit.amplitude) << ',' << num(fit.r_squared) << '\n';
  Sink sink(opt, out);
  sink.emit("fit.csv", text.str());
  if (opt.json) {
    const json j = {{"column", opt.column},
                    {"points", fit.points},
                    {"exponent", fit.exponent},
                    {"amplitude", fit.amplitude},
                    {"r_squared", fit.r_squared}};
    sink.emit("fit.json", j.dump(2) + "\n");
  }
  sink.manifest("fit", std::nullopt);
  return kExitOk;
}

int cmd_compare(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt);
  const std::vector<ScanRow> rows =
      run_scan(config.model, config.particle_list, resolve_workers(opt.workers));
  const std::vector<std::string> columns = {
      "N",          "E_exact",    "E_level0",        "E_level1",       "E_level2",
      "gap_level0", "gap_level1", "gap_level2",      "depletion_exact", "depletion_pred",
      "depletion_gap", "dm_trace_dist"};
  std::ostringstream csv;
  json j = json::array();
  for (std::size_t c = 0; c < columns.size(); ++c) csv << (c ? "," : "") << columns[c];
  csv << '\n';
  bool failed = false;
  for (const ScanRow& row : rows) {
    failed = failed || !row.ok();
    json entry;
    csv << row.N;
    entry["N"] = row.N;
    for (std::size_t c = 1; c < columns.size(); ++c) {
      const double v = scan_value(row, columns[c]);
      csv << ',' << num(v);
      entry[columns[c]] = num_json(v);
    }
    csv << '\n';
    j.push_back(entry);
  }
  Sink sink(opt, out);
  sink.emit("compare.csv", csv.str());
  if (opt.json) sink.emit("compare.json", j.dump(2) + "\n");
  sink.manifest("compare", config);
  return failed ? kExitSolver : kExitOk;
}

int cmd_selftest(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt);
  const std::vector<CheckResult> checks = run_selftest(config);
  std::ostringstream text;
  json j = json::array();
  bool all = true;
  text << "check,status,value,bound\n";
  for (const CheckResult& c : checks) {
    all = all && c.passed;
    text << c.name << ',' << (c.passed ? "PASS" : "FAIL") << ',' << num(c.value) << ','
         << num(c.bound) << '\n';
    j.push_back({{"name", c.name}, {"passed", c.passed}, {"value", num_json(c.value)},
                 {"bound", c.bound}});
  }
  Sink sink(opt, out);
  sink.emit("selftest.csv", text.str());
  if (opt.json) sink.emit("selftest.json", j.dump(2) + "\n");
  sink.manifest("selftest", config);
  return all ? kExitOk : kExitAssertion;
}

double ccr_defect(const ModeSet& modes, int cutoff) {
  const BasisPtr basis = enumerate_excitation(modes, cutoff, false);
  const auto n = static_cast<Eigen::Index>(basis->size());
  double worst = 0.0;
  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (p == modes.zero_index()) continue;
    for (std::size_t q = 0; q < modes.size(); ++q) {
      if (q == modes.zero_index()) continue;
      auto forward = matrix_element_monomial(*basis, {annihilate(p), create(q)}, 1.0);
      const auto backward = matrix_element_monomial(*basis, {create(q), annihilate(p)}, -1.0);
      forward.insert(forward.end(), backward.begin(), backward.end());
      Eigen::SparseMatrix<double> comm(n, n);
      comm.setFromTriplets(forward.begin(), forward.end());
      const Eigen::MatrixXd dense(comm);
      for (Eigen::Index col = 0; col < n; ++col) {
        if (basis->excited_count(static_cast<std::size_t>(col)) >= cutoff) continue;
        Eigen::VectorXd expected = Eigen::VectorXd::Zero(n);
        if (p == q) expected[col] = 1.0;
        worst = std::max(worst, (dense.col(col) - expected).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

double excitation_map_defect(const ModeSet& modes, int particles) {
  const BasisPtr canonical = enumerate_canonical(modes, particles, false);
  const BasisPtr excitation = enumerate_excitation(modes, particles, false);
  const auto dim = static_cast<Eigen::Index>(canonical->size());
  const auto edim = static_cast<Eigen::Index>(excitation->size());
  const std::size_t zero = modes.zero_index();
  double worst = 0.0;
  auto compare = [&](const Monomial& lhs, const Monomial& rhs, const NumberFunction& right) {
    const auto t = matrix_element_monomial(*canonical, lhs, 1.0);
    Eigen::SparseMatrix<double> op(dim, dim);
    op.setFromTriplets(t.begin(), t.end());
    const Eigen::MatrixXd mapped = conjugate_by_excitation_map(*canonical, *excitation, op);
    const auto r = matrix_element_monomial(*excitation, rhs, 1.0, {}, right);
    Eigen::SparseMatrix<double> expected(edim, edim);
    expected.setFromTriplets(r.begin(), r.end());
    worst = std::max(worst, (mapped - Eigen::MatrixXd(expected)).cwiseAbs().maxCoeff());
  };
  const double n = particles;
  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (p == zero) continue;
    compare({create(p), annihilate(zero)}, {create(p)},
            [n](int m) { return std::sqrt(std::max(0.0, n - m)); });
    for (std::size_t q = 0; q < modes.size(); ++q) {
      if (q == zero) continue;
      compare({create(p), annihilate(q)}, {create(p), annihilate(q)}, {});
    }
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> run_selftest(const RunConfig& run) {
  const ModelConfig& config = run.model;
  std::vector<CheckResult> out;
  auto record = [&](std::string name, double value, double bound) {
    out.push_back({std::move(name), value <= bound, value, bound});
  };

  record("ccr", ccr_defect(config.modes, std::min(config.excitation_cutoff, 4)), 1e-12);
  record("excitation_map", excitation_map_defect(config.modes, std::min(config.particles, 4)),
         1e-12);

  const BasisPtr basis =
      enumerate_excitation(config.modes, config.excitation_cutoff, !config.full_space);
  const BogoliubovData bog = coefficients(config.potential, config.modes);
  record("hermitian_H_Bog", build_HBog(config, basis).symmetry_defect(), 1e-12);
  record("hermitian_G_N", build_GN(config, basis).symmetry_defect(), 1e-12);
  record("hermitian_C_N", build_CN(config, bog, basis).symmetry_defect(), 1e-12);
  const SparseOperator b = build_quadratic_generator(bog, basis);
  record("antihermitian_B", b.symmetry_defect(), 1e-12);
  record("antihermitian_S", build_cubic_generator(config, bog, basis).symmetry_defect(), 1e-12);
  record("cubic_relation", cubic_relation_defect(config), 1e-10);
  const Unitary u_b(b.matrix(), config.expm_tol, ExpmMethod::automatic, config.rng_seed);
  record("unitarity_U_B", u_b.unitarity_residual(), 10.0 * config.expm_tol);

  const OnsagerReport onsager =
      onsager_check(config.potential, config.modes, config.particles, 10000, config.rng_seed);
  out.push_back({"onsager", onsager.passed, onsager.min_slack, -1e-9});
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bogoliubov theory with cubic corrections versus exact diagonalization"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config_path, "JSON configuration file");
    if (config_required) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory (default: stdout)");
    sub->add_flag("--json", opt.json, "also emit JSON mirrors of every table");
    sub->add_option("--workers", opt.workers, "worker threads (MFBOG_WORKERS overrides)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", opt.seed, "override rng_seed");
  };
  CLI::App* predict = app.add_subcommand("predict", "closed-form Bogoliubov table");
  CLI::App* exact = app.add_subcommand("exact", "exact ground state per N");
  CLI::App* scan = app.add_subcommand("scan", "N scan with predictions and residuals");
  CLI::App* compare = app.add_subcommand("compare", "exact values against predictions");
  CLI::App* selftest = app.add_subcommand("selftest", "operator identities and sanity checks");
  CLI::App* fit = app.add_subcommand("fit", "power-law fit of a scan CSV column");
  common(predict, true);
  common(exact, true);
  common(scan, true);
  common(compare, true);
  common(selftest, false);
  fit->add_option("--csv", opt.csv_path, "scan CSV")->required();
  fit->add_option("--column", opt.column, "column (or gap_level0/1/2, depletion_gap)")
      ->required();
  fit->add_flag("--top-half", opt.top_half_only, "fit only the last ceil(n/2) rows");
  fit->add_option("--out", opt.out_dir, "output directory (default: stdout)");
  fit->add_flag("--json", opt.json, "also emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*predict) return cmd_predict(opt, out);
    if (*exact) return cmd_exact(opt, out);
    if (*scan) return cmd_scan(opt, out, err);
    if (*compare) return cmd_compare(opt, out);
    if (*selftest) return cmd_selftest(opt, out);
    if (*fit) return cmd_fit(opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << " (best residual " << e.best_residual() << ")\n";
    return kExitSolver;
  } catch (const TruncationError& e) {
    err << "truncation: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace mfbog
