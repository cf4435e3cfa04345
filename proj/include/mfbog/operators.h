#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "mfbog/bogoliubov.h"
#include "mfbog/expm.h"
#include "mfbog/fock.h"
#include "mfbog/model.h"
#include "mfbog/sparse_operator.h"

namespace mfbog {

/// Mean-field Hamiltonian
///   sum_p p^2 a*_p a_p + 1/(2(N-1)) sum_{p,q,k} w(k) a*_{p-k} a*_{q+k} a_p a_q
/// on a canonical basis with N = config.particles.
OperatorRecipe hamiltonian_recipe(const ModelConfig& config);
SparseOperator build_HN(const ModelConfig& config, const BasisPtr& canonical);

/// sum_{p!=0} (p^2 + w(p)) a*_p a_p + 1/2 w(p) (a*_p a*_{-p} + a_p a_{-p}).
OperatorRecipe bogoliubov_recipe(const ModelConfig& config);
SparseOperator build_HBog(const ModelConfig& config, const BasisPtr& excitation);

/// Excitation-space image of H_N - N w(0)/2 up to the error terms: H_Bog plus
/// the N_+ corrections, the cubic and the quartic term.
OperatorRecipe excitation_hamiltonian_recipe(const ModelConfig& config);
SparseOperator build_GN(const ModelConfig& config, const BasisPtr& excitation);

/// Cubic term left after conjugating by U_B:
///   N^{-1/2} sum_{p,q} c_{p,q} a*_{p+q} a*_{-p} a*_{-q} + h.c.
/// with c_{p,q} the numerator of the cubic kernel.
SparseOperator build_CN(const ModelConfig& config, const BogoliubovData& bog,
                        const BasisPtr& excitation);

/// dGamma(e) = sum_{p!=0} e_p a*_p a_p.
SparseOperator build_dispersion(const BogoliubovData& bog, const BasisPtr& excitation);

/// N_+ (excitation basis) or the total particle number of excited modes.
SparseOperator build_number_operator(const BasisPtr& basis);

/// B = sum_{p!=0} beta_p (a*_p a*_{-p} - a_p a_{-p}).
SparseOperator build_quadratic_generator(const BogoliubovData& bog,
                                         const BasisPtr& excitation);

/// S = N^{-1/2} sum eta_{p,q} (a*_{p+q} a*_{-p} a*_{-q} 1(N_+ <= N) - h.c.).
/// `particle_cutoff = false` drops the indicator.
SparseOperator build_cubic_generator(const ModelConfig& config, const BogoliubovData& bog,
                                     const BasisPtr& excitation, bool particle_cutoff = true);

/// U A U^*. Throws std::invalid_argument on a dimension mismatch.
Eigen::MatrixXd conjugate(const Eigen::MatrixXd& op, const Unitary& u);
Eigen::MatrixXd conjugate(const SparseOperator& op, const Unitary& u);

/// (reference, reference) entry: the vacuum of an excitation basis.
double vacuum_expectation(const SparseOperator& op);
double vacuum_expectation(const Eigen::MatrixXd& op, const SectorBasis& basis);

/// Commutator [A, B] as a dense matrix.
Eigen::MatrixXd commutator(const SparseOperator& a, const SparseOperator& b);

struct OnsagerReport {
  int samples = 0;
  double min_slack = 0.0;
  bool passed = true;
};

/// Samples N uniform positions on the torus per draw and checks
///   (N-1)^{-1} sum_{i<j} w(x_i - x_j) >= N w(0)/2 - N w(x=0)/(N-1)
/// with slack >= -1e-9.
OnsagerReport onsager_check(const Potential& potential, const ModeSet& modes, int particles,
                            int samples, std::uint64_t seed);

}  // namespace mfbog
