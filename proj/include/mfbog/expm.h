#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mfbog/errors.h"

namespace mfbog {

enum class ExpmMethod { automatic, dense, krylov };

/// Dimension from which the automatic method switches to Krylov action.
inline constexpr Eigen::Index kKrylovThreshold = 2000;

/// exp(A) by scaling and squaring around a degree-13 Pade approximant.
Eigen::MatrixXd expm_dense(const Eigen::MatrixXd& a);

/// exp(t G) v by restarted Arnoldi with adaptive substeps. Throws SolverError
/// when the step size collapses before the local error drops below tol.
Eigen::VectorXd expm_krylov_action(const Eigen::SparseMatrix<double>& g,
                                   const Eigen::VectorXd& v, double t, double tol,
                                   int krylov_dim = 30);

/// exp(G) for a real antisymmetric generator G; dense or action-only.
class Unitary {
 public:
  /// Throws std::invalid_argument if G is not antisymmetric within 1e-10
  /// (relative to its largest entry) and SolverError if the unitarity
  /// residual exceeds 10 * tol.
  Unitary(const Eigen::SparseMatrix<double>& generator, double tol,
          ExpmMethod method = ExpmMethod::automatic, std::uint64_t seed = 0);

  static Unitary identity(Eigen::Index dimension);

  Eigen::Index dimension() const { return dimension_; }
  bool is_dense() const { return dense_; }
  /// Dense matrix; throws std::logic_error for an action-only unitary.
  const Eigen::MatrixXd& matrix() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;
  Eigen::MatrixXd apply_adjoint(const Eigen::MatrixXd& m) const;

  /// max |U^T U - I| (dense) or the worst round-trip defect on random probes.
  double unitarity_residual() const { return unitarity_residual_; }

 private:
  Unitary() = default;

  Eigen::Index dimension_ = 0;
  bool dense_ = true;
  double tol_ = 0.0;
  Eigen::MatrixXd matrix_;
  Eigen::SparseMatrix<double> generator_;
  double unitarity_residual_ = 0.0;
};

}  // namespace mfbog
