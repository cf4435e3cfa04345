#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "mfbog/expm.h"
#include "mfbog/fock.h"
#include "mfbog/model.h"
#include "mfbog/sparse_operator.h"

namespace mfbog {

/// Dimension below which ground_state diagonalizes densely.
inline constexpr Eigen::Index kDenseThreshold = 500;

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd vector;
  /// ||H psi - E psi||.
  double residual = 0.0;
  BasisPtr basis;
};

enum class EigenMethod { automatic, dense, lanczos };

/// Lowest eigenpair of a hermitian operator. The phase makes the reference
/// coefficient (condensate or vacuum) nonnegative; without a reference state
/// the largest-magnitude coefficient is made positive. Throws SolverError
/// when ||H psi - E psi|| > tol * max(1, |E|) after the iteration budget.
GroundState ground_state(const SparseOperator& op, double tol, std::uint64_t seed,
                         EigenMethod method = EigenMethod::automatic);

/// gamma_{pq} = <psi, a*_p a_q psi>, indexed by ModeSet position.
Eigen::MatrixXd one_body_density_matrix(const SectorBasis& basis, const Eigen::VectorXd& psi);
Eigen::MatrixXd one_body_density_matrix(const GroundState& state);

/// <psi, N_+^s psi> from the occupation diagonals.
double expectation_moment(const SectorBasis& basis, const Eigen::VectorXd& psi, int s);
double expectation_moment(const GroundState& state, int s);

/// Sum of |eigenvalues(A - B)| for symmetric A, B.
double trace_norm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct TransformedResiduals {
  /// <Phi, N_+ Phi> with Phi = U_S U_B U_N psi.
  double phi_number = 0.0;
  /// ||U_N psi - U_B^* U_S^* |0>||^2 with the vacuum coefficient of Phi >= 0.
  double norm_gap = 0.0;
  /// Weight of psi on states beyond the excitation cutoff.
  double tail_weight = 0.0;
  /// Tail weight above the 1e-10 gate.
  bool flagged = false;
};

inline constexpr double kTailGate = 1e-10;

/// Residuals of the cubic-corrected norm approximation for a canonical
/// ground state, given U_B = exp(B) and U_S = exp(S) on `excitation`.
TransformedResiduals transformed_residuals(const GroundState& state,
                                           const BasisPtr& excitation, const Unitary& u_b,
                                           const Unitary& u_s);

/// Builds B, S and their exponentials from the config, then as above.
TransformedResiduals transformed_residuals(const GroundState& state, const ModelConfig& config);

}  // namespace mfbog
