#include "mfbog/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>

#include "mfbog/bogoliubov.h"
#include "mfbog/expm.h"
#include "mfbog/fock.h"
#include "mfbog/operators.h"
#include "mfbog/solver.h"

namespace mfbog {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shared, read-only inputs of one scan.
struct ScanContext {
  ModelConfig config;
  BasisPtr excitation;
  BogoliubovData bog;
  Unitary u_b;
};

ScanRow failed_row(int n, const std::string& message) {
  ScanRow row;
  row.N = n;
  row.E_exact = row.E_level0 = row.E_level1 = row.E_level2 = kNaN;
  row.depletion_exact = row.depletion_pred = kNaN;
  row.moments.fill(kNaN);
  row.phi_number = row.norm_gap = row.dm_trace_dist = kNaN;
  row.max_offdiagonal = row.eigen_residual = row.tail_weight = kNaN;
  row.error = message.empty() ? "unknown failure" : message;
  return row;
}

ScanRow scan_point(const ScanContext& ctx, int n) {
  ModelConfig config = ctx.config;
  config.particles = n;
  const ModeSet& modes = config.modes;
  const double w0 = config.potential.zero_mode();

  ScanRow row;
  row.N = n;
  row.E_level0 = n * w0 / 2.0;
  row.E_level1 = row.E_level0 + ctx.bog.energy();
  row.depletion_pred = ctx.bog.depletion();

  const BasisPtr canonical = enumerate_canonical(modes, n, !config.full_space);
  const SparseOperator h = build_HN(config, canonical);
  const GroundState gs = ground_state(h, config.eigensolver_tol, config.rng_seed);
  row.E_exact = gs.energy;
  row.eigen_residual = gs.residual;

  const Eigen::MatrixXd gamma = one_body_density_matrix(gs);
  const auto zero = static_cast<Eigen::Index>(modes.zero_index());
  row.depletion_exact = n - gamma(zero, zero);
  Eigen::MatrixXd off = gamma;
  off.diagonal().setZero();
  row.max_offdiagonal = off.size() == 0 ? 0.0 : off.cwiseAbs().maxCoeff();

  const DensityMatrixPrediction pred = predicted_density_matrix(ctx.bog, n);
  const Eigen::VectorXd weights =
      Eigen::Map<const Eigen::VectorXd>(pred.weights.data(), static_cast<Eigen::Index>(pred.weights.size()));
  row.dm_trace_dist = trace_norm_diff(gamma, weights.asDiagonal().toDenseMatrix());

  for (int s = 1; s <= 4; ++s) row.moments[s - 1] = expectation_moment(gs, s);

  const SparseOperator s_gen = build_cubic_generator(config, ctx.bog, ctx.excitation);
  const Unitary u_s(s_gen.matrix(), config.expm_tol, ExpmMethod::automatic, config.rng_seed);

  // level 2: <0| U_S U_B G_N U_B^* U_S^* |0> = <v, G_N v>, v = U_B^* U_S^* |0>
  const SparseOperator g = build_GN(config, ctx.excitation);
  Eigen::VectorXd vacuum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ctx.excitation->size()));
  vacuum[static_cast<Eigen::Index>(*ctx.excitation->reference_index())] = 1.0;
  const Eigen::VectorXd v = ctx.u_b.apply_adjoint(u_s.apply_adjoint(vacuum));
  row.E_level2 = row.E_level0 + v.dot(g.matrix() * v);

  const TransformedResiduals tr = transformed_residuals(gs, ctx.excitation, ctx.u_b, u_s);
  row.phi_number = tr.phi_number;
  row.norm_gap = tr.norm_gap;
  row.tail_weight = tr.tail_weight;
  row.tail_flagged = tr.flagged;
  return row;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const std::vector<std::string>& scan_columns() {
  static const std::vector<std::string> columns = {
      "N",          "E_exact",  "E_level0",      "E_level1",       "E_level2",
      "depletion_exact", "depletion_pred", "m1", "m2", "m3", "m4",
      "phi_number", "norm_gap", "dm_trace_dist"};
  return columns;
}

double scan_value(const ScanRow& row, const std::string& column) {
  if (column == "N") return row.N;
  if (column == "E_exact") return row.E_exact;
  if (column == "E_level0") return row.E_level0;
  if (column == "E_level1") return row.E_level1;
  if (column == "E_level2") return row.E_level2;
  if (column == "depletion_exact") return row.depletion_exact;
  if (column == "depletion_pred") return row.depletion_pred;
  if (column == "m1") return row.moments[0];
  if (column == "m2") return row.moments[1];
  if (column == "m3") return row.moments[2];
  if (column == "m4") return row.moments[3];
  if (column == "phi_number") return row.phi_number;
  if (column == "norm_gap") return row.norm_gap;
  if (column == "dm_trace_dist") return row.dm_trace_dist;
  if (column == "gap_level0") return std::abs(row.E_exact - row.E_level0);
  if (column == "gap_level1") return std::abs(row.E_exact - row.E_level1);
  if (column == "gap_level2") return std::abs(row.E_exact - row.E_level2);
  if (column == "depletion_gap") return std::abs(row.depletion_exact - row.depletion_pred);
  throw std::invalid_argument("unknown scan column '" + column + "'");
}

int resolve_workers(int requested) {
  if (const char* env = std::getenv("MFBOG_WORKERS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<int>(value);
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<ScanRow> run_scan(const ModelConfig& config, const std::vector<int>& N_list,
                              int workers) {
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 3) throw std::invalid_argument("scan needs every N >= 3");
    if (i > 0 && N_list[i] <= N_list[i - 1]) {
      throw std::invalid_argument("scan N list must be strictly ascending");
    }
  }
  ModelConfig base = config;
  if (!N_list.empty()) base.particles = N_list.front();
  base.validate();

  const BasisPtr excitation =
      enumerate_excitation(base.modes, base.excitation_cutoff, !base.full_space);
  BogoliubovData bog = coefficients(base.potential, base.modes);
  Unitary u_b(build_quadratic_generator(bog, excitation).matrix(), base.expm_tol,
              ExpmMethod::automatic, base.rng_seed);
  const ScanContext ctx{base, excitation, std::move(bog), std::move(u_b)};

  std::vector<ScanRow> rows(N_list.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < N_list.size(); i = next++) {
      try {
        rows[i] = scan_point(ctx, N_list[i]);
      } catch (const std::exception& e) {
        rows[i] = failed_row(N_list[i], e.what());
      }
    }
  };
  const int count = std::min<int>(std::max(1, workers), static_cast<int>(N_list.size()));
  if (count <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return rows;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("power-law fit needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw std::invalid_argument("power-law fit needs strictly positive finite values");
    }
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("power-law fit needs distinct N values");
  PowerLawFit fit;
  fit.points = points;
  fit.exponent = sxy / sxx;
  fit.amplitude = std::exp(my - fit.exponent * mx);
  const double ss_res = syy - fit.exponent * sxy;
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

std::vector<std::pair<double, double>> column_pairs(const std::vector<ScanRow>& rows,
                                                    const std::string& column) {
  std::vector<std::pair<double, double>> out;
  for (const ScanRow& row : rows) {
    if (!row.ok()) continue;
    out.emplace_back(row.N, scan_value(row, column));
  }
  return out;
}

std::vector<ScanRow> top_half(const std::vector<ScanRow>& rows) {
  const std::size_t keep = (rows.size() + 1) / 2;
  return {rows.end() - static_cast<std::ptrdiff_t>(keep), rows.end()};
}

namespace {

std::vector<Eigen::Index> low_block(const SectorBasis& basis, int bound) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis.excited_count(i) <= bound) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<CutoffRow> cutoff_convergence(const ModelConfig& config,
                                          const std::vector<int>& M_list) {
  for (std::size_t i = 1; i < M_list.size(); ++i) {
    if (M_list[i] <= M_list[i - 1]) {
      throw std::invalid_argument("cutoff list must be strictly ascending");
    }
  }
  const BogoliubovData bog = coefficients(config.potential, config.modes);
  std::vector<CutoffRow> out;
  for (int m : M_list) {
    if (m < 1) throw std::invalid_argument("cutoff must be >= 1");
    const BasisPtr basis = enumerate_excitation(config.modes, m, !config.full_space);
    const Unitary u_b(build_quadratic_generator(bog, basis).matrix(), config.expm_tol,
                      ExpmMethod::automatic, config.rng_seed);
    const Eigen::MatrixXd rotated = conjugate(build_HBog(config, basis), u_b);
    Eigen::MatrixXd target = build_dispersion(bog, basis).dense();
    target.diagonal().array() += bog.energy();

    const auto low = low_block(*basis, 2);
    const Eigen::MatrixXd defect = (rotated - target)(low, low);

    CutoffRow row;
    row.M = m;
    row.dimension = basis->size();
    row.vacuum_expectation = vacuum_expectation(rotated, *basis);
    row.gap = std::abs(row.vacuum_expectation - bog.energy());
    row.residual = spectral_norm(defect);
    out.push_back(row);
  }
  return out;
}

MomentReport moment_boundedness(const std::vector<ScanRow>& rows, int s_max) {
  if (rows.size() < 3) throw std::invalid_argument("moment report needs at least 3 rows");
  if (s_max < 1 || s_max > 4) throw std::invalid_argument("moment order must be in 1..4");
  MomentReport report;
  for (int s = 1; s <= s_max; ++s) {
    MomentBound b;
    b.s = s;
    b.max = -std::numeric_limits<double>::infinity();
    b.min = std::numeric_limits<double>::infinity();
    for (const ScanRow& row : rows) {
      if (!row.ok()) continue;
      b.max = std::max(b.max, row.moments[s - 1]);
      b.min = std::min(b.min, row.moments[s - 1]);
    }
    if (b.max == 0.0) {
      b.ratio = 1.0;
    } else if (b.min > 0.0) {
      b.ratio = b.max / b.min;
    } else {
      b.ratio = std::numeric_limits<double>::infinity();
    }
    report.passed = report.passed && b.ratio <= 3.0;
    report.bounds.push_back(b);
  }
  return report;
}

double cubic_relation_defect(const ModelConfig& config) {
  config.validate();
  const BasisPtr basis =
      enumerate_excitation(config.modes, config.excitation_cutoff, !config.full_space);
  const BogoliubovData bog = coefficients(config.potential, config.modes);
  const SparseOperator s = build_cubic_generator(config, bog, basis);
  const SparseOperator e = build_dispersion(bog, basis);
  const SparseOperator c = build_CN(config, bog, basis);
  const Eigen::MatrixXd defect = commutator(s, e) + c.dense();
  const auto block = low_block(*basis, config.particles - 3);
  if (block.empty()) return 0.0;
  return defect(block, block).cwiseAbs().maxCoeff();
}

ApproximationResidual excitation_approximation_residual(const ModelConfig& config,
                                                        int block) {
  config.validate();
  const int n = config.particles;
  const int bound = std::min(block, n);
  const BasisPtr canonical = enumerate_canonical(config.modes, n, !config.full_space);
  const BasisPtr excitation =
      enumerate_excitation(config.modes, std::max(config.excitation_cutoff, bound),
                           !config.full_space);
  const Eigen::MatrixXd mapped =
      conjugate_by_excitation_map(*canonical, *excitation, build_HN(config, canonical).matrix());
  Eigen::MatrixXd defect = mapped - build_GN(config, excitation).dense();
  defect.diagonal().array() -= n * config.potential.zero_mode() / 2.0;

  const auto low = low_block(*excitation, bound);
  const Eigen::MatrixXd sub = defect(low, low);
  Eigen::VectorXd weight(static_cast<Eigen::Index>(low.size()));
  for (std::size_t i = 0; i < low.size(); ++i) {
    const int count = excitation->excited_count(static_cast<std::size_t>(low[i]));
    weight[static_cast<Eigen::Index>(i)] = std::pow(count + 1.0, -1.5);
  }
  ApproximationResidual out;
  out.raw = spectral_norm(sub);
  out.weighted = spectral_norm(weight.asDiagonal() * sub * weight.asDiagonal());
  return out;
}

bool strictly_decreasing(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1])) return false;
  }
  return true;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  const auto& columns = scan_columns();
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const ScanRow& row : rows) {
    out << row.N;
    for (std::size_t c = 1; c < columns.size(); ++c) {
      out << ',' << format_double(scan_value(row, columns[c]));
    }
    out << '\n';
  }
}

std::vector<ScanRow> read_scan_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (std::find(header.begin(), header.end(), "N") == header.end()) {
    throw std::invalid_argument("CSV has no N column");
  }
  std::vector<ScanRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::map<std::string, double> values;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= header.size()) {
        throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": too many cells");
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": bad number '" +
                                    cell + "'");
      }
      values[header[c++]] = v;
    }
    ScanRow row;
    auto get = [&](const char* key) {
      const auto it = values.find(key);
      return it == values.end() ? kNaN : it->second;
    };
    row.N = static_cast<int>(get("N"));
    row.E_exact = get("E_exact");
    row.E_level0 = get("E_level0");
    row.E_level1 = get("E_level1");
    row.E_level2 = get("E_level2");
    row.depletion_exact = get("depletion_exact");
    row.depletion_pred = get("depletion_pred");
    row.moments = {get("m1"), get("m2"), get("m3"), get("m4")};
    row.phi_number = get("phi_number");
    row.norm_gap = get("norm_gap");
    row.dm_trace_dist = get("dm_trace_dist");
    if (std::isnan(row.E_exact)) row.error = "missing in CSV";
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mfbog
