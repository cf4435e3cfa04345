#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mfbog/model.h"

namespace mfbog {

/// One N of a scan. Failed points keep N, carry the message in `error` and
/// NaN in every numeric column.
struct ScanRow {
  int N = 0;
  double E_exact = 0.0;
  double E_level0 = 0.0;
  double E_level1 = 0.0;
  double E_level2 = 0.0;
  double depletion_exact = 0.0;
  double depletion_pred = 0.0;
  std::array<double, 4> moments{};  // <N_+^s>, s = 1..4
  double phi_number = 0.0;
  double norm_gap = 0.0;
  double dm_trace_dist = 0.0;

  // diagnostics outside the CSV contract
  double max_offdiagonal = 0.0;  // largest |gamma_{pq}|, p != q
  double eigen_residual = 0.0;
  double tail_weight = 0.0;
  bool tail_flagged = false;
  std::string error;

  bool ok() const { return error.empty(); }
};

/// CSV header, in column order.
const std::vector<std::string>& scan_columns();

/// Value of a CSV column, or of a derived column: gap_level0, gap_level1,
/// gap_level2 (|E_exact - E_levelk|) and depletion_gap (|exact - pred|).
double scan_value(const ScanRow& row, const std::string& column);

/// Worker count: MFBOG_WORKERS when set, else `requested` when positive,
/// else the hardware concurrency.
int resolve_workers(int requested);

/// Exact diagonalization plus every prediction for each N. N_list must be
/// ascending with entries >= 3. Rows come back in N_list order regardless of
/// worker scheduling.
std::vector<ScanRow> run_scan(const ModelConfig& config, const std::vector<int>& N_list,
                              int workers = 1);

struct PowerLawFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;
};

/// Least squares of log(value) against log(N). Throws std::invalid_argument
/// for fewer than 3 points or a nonpositive coordinate.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

/// (N, column) pairs over successful rows.
std::vector<std::pair<double, double>> column_pairs(const std::vector<ScanRow>& rows,
                                                    const std::string& column);

/// The last ceil(n/2) rows.
std::vector<ScanRow> top_half(const std::vector<ScanRow>& rows);

struct CutoffRow {
  int M = 0;
  std::size_t dimension = 0;
  double vacuum_expectation = 0.0;  // <0| U_B H_Bog U_B^* |0>
  double gap = 0.0;                 // |vacuum_expectation - E_Bog|
  double residual = 0.0;            // 2-norm of the diagonalization defect on N_+ <= 2
};

std::vector<CutoffRow> cutoff_convergence(const ModelConfig& config,
                                          const std::vector<int>& M_list);

struct MomentBound {
  int s = 0;
  double max = 0.0;
  double min = 0.0;
  double ratio = 1.0;  // 1 when every moment vanishes
};

struct MomentReport {
  std::vector<MomentBound> bounds;
  bool passed = true;  // every ratio <= 3
};

MomentReport moment_boundedness(const std::vector<ScanRow>& rows, int s_max = 4);

/// max |entry| of [S, dGamma(e)] + C_N over the block N_+ <= N - 3 (rows and
/// columns), where the particle cutoff inside S is inert.
double cubic_relation_defect(const ModelConfig& config);

struct ApproximationResidual {
  double raw = 0.0;       // 2-norm of the defect block
  double weighted = 0.0;  // same with (N_+ + 1)^{-3/2} on both sides
};

/// Defect of U_N H_N U_N^* - N w(0)/2 - G_N on the block N_+ <= block.
ApproximationResidual excitation_approximation_residual(const ModelConfig& config,
                                                        int block = 4);

/// True when every entry is strictly below its predecessor.
bool strictly_decreasing(const std::vector<double>& values);

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);
/// Reads the columns written by write_scan_csv; unknown columns are ignored.
std::vector<ScanRow> read_scan_csv(std::istream& in);

}  // namespace mfbog
