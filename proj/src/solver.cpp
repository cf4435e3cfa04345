#include "mfbog/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mfbog/bogoliubov.h"
#include "mfbog/operators.h"

namespace mfbog {

namespace {

void fix_phase(const SectorBasis& basis, Eigen::VectorXd& v) {
  const auto ref = basis.reference_index();
  Eigen::Index pivot = 0;
  if (ref && std::abs(v[static_cast<Eigen::Index>(*ref)]) > 0.0) {
    pivot = static_cast<Eigen::Index>(*ref);
  } else {
    v.cwiseAbs().maxCoeff(&pivot);
  }
  if (v[pivot] < 0.0) v = -v;
}

struct Eigenpair {
  double value;
  Eigen::VectorXd vector;
};

Eigenpair dense_lowest(const Eigen::SparseMatrix<double>& h) {
  const Eigen::MatrixXd dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  if (eig.info() != Eigen::Success) {
    throw SolverError("dense eigensolver failed", std::numeric_limits<double>::infinity());
  }
  return {eig.eigenvalues()[0], eig.eigenvectors().col(0)};
}

// Restarted Lanczos with full reorthogonalization; restarts from the current
// Ritz vector.
Eigenpair lanczos_lowest(const Eigen::SparseMatrix<double>& h, double tol, std::uint64_t seed) {
  const Eigen::Index n = h.rows();
  const Eigen::Index m = std::min<Eigen::Index>(n, 80);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
  x.normalize();

  double best = std::numeric_limits<double>::infinity();
  Eigenpair out{0.0, x};
  for (int restart = 0; restart < 500; ++restart) {
    Eigen::MatrixXd q(n, m);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    q.col(0) = x;
    Eigen::Index k = m;
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::VectorXd z = h * q.col(j);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = q.leftCols(j + 1).transpose() * z;
        z -= q.leftCols(j + 1) * c;
        t.col(j).head(j + 1) += c;
      }
      if (j + 1 == m) break;
      const double next = z.norm();
      if (next < 1e-13) {
        k = j + 1;
        break;
      }
      t(j + 1, j) = next;  // the upper partner comes from the next projection
      q.col(j + 1) = z / next;
    }
    Eigen::MatrixXd tk = t.topLeftCorner(k, k);
    tk = 0.5 * (tk + tk.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tk);
    x = q.leftCols(k) * small.eigenvectors().col(0);
    x.normalize();
    const double theta = x.dot(h * x);
    const double residual = (h * x - theta * x).norm();
    best = std::min(best, residual);
    out = {theta, x};
    if (residual <= tol * std::max(1.0, std::abs(theta))) return out;
  }
  throw SolverError("lanczos did not converge", best);
}

}  // namespace

GroundState ground_state(const SparseOperator& op, double tol, std::uint64_t seed,
                         EigenMethod method) {
  if (op.symmetry() != Symmetry::hermitian) {
    throw std::invalid_argument("ground_state needs a hermitian operator");
  }
  if (op.dimension() == 0) throw std::invalid_argument("ground_state on an empty basis");
  if (method == EigenMethod::automatic) {
    method = op.dimension() < kDenseThreshold ? EigenMethod::dense : EigenMethod::lanczos;
  }
  Eigenpair pair = method == EigenMethod::dense ? dense_lowest(op.matrix())
                                                : lanczos_lowest(op.matrix(), tol, seed);
  GroundState gs;
  gs.basis = op.basis_ptr();
  gs.vector = pair.vector.normalized();
  fix_phase(op.basis(), gs.vector);
  gs.energy = gs.vector.dot(op.matrix() * gs.vector);
  gs.residual = (op.matrix() * gs.vector - gs.energy * gs.vector).norm();
  if (gs.residual > tol * std::max(1.0, std::abs(gs.energy))) {
    throw SolverError("ground state residual above tolerance", gs.residual);
  }
  return gs;
}

Eigen::MatrixXd one_body_density_matrix(const SectorBasis& basis, const Eigen::VectorXd& psi) {
  if (static_cast<std::size_t>(psi.size()) != basis.size()) {
    throw std::invalid_argument("density matrix: vector length does not match basis");
  }
  const ModeSet& modes = basis.modes();
  const auto n_modes = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n_modes, n_modes);
  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (!basis.mode_slot(p)) continue;
    for (std::size_t q = 0; q < modes.size(); ++q) {
      if (!basis.mode_slot(q)) continue;
      const Monomial hop = {create(p), annihilate(q)};
      double total = 0.0;
      for (std::size_t col = 0; col < basis.size(); ++col) {
        const double c = psi[static_cast<Eigen::Index>(col)];
        if (c == 0.0) continue;
        const LadderImage image = apply_monomial(basis, basis.state(col), hop);
        if (image.amplitude == 0.0) continue;
        const auto row = basis.find(image.state);
        if (!row) continue;
        total += psi[static_cast<Eigen::Index>(*row)] * image.amplitude * c;
      }
      gamma(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = total;
    }
  }
  return gamma;
}

Eigen::MatrixXd one_body_density_matrix(const GroundState& state) {
  return one_body_density_matrix(*state.basis, state.vector);
}

double expectation_moment(const SectorBasis& basis, const Eigen::VectorXd& psi, int s) {
  if (s < 1) throw std::invalid_argument("moment order must be >= 1");
  if (static_cast<std::size_t>(psi.size()) != basis.size()) {
    throw std::invalid_argument("moment: vector length does not match basis");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double c = psi[static_cast<Eigen::Index>(i)];
    total += c * c * std::pow(static_cast<double>(basis.excited_count(i)), s);
  }
  return total;
}

double expectation_moment(const GroundState& state, int s) {
  return expectation_moment(*state.basis, state.vector, s);
}

double trace_norm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw std::invalid_argument("trace_norm_diff: dimension mismatch");
  }
  if (a.rows() == 0) return 0.0;
  const Eigen::MatrixXd diff = a - b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (diff + diff.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().sum();
}

TransformedResiduals transformed_residuals(const GroundState& state,
                                           const BasisPtr& excitation, const Unitary& u_b,
                                           const Unitary& u_s) {
  if (state.basis->kind() != SectorKind::canonical) {
    throw std::invalid_argument("transformed_residuals needs a canonical ground state");
  }
  const auto dim = static_cast<Eigen::Index>(excitation->size());
  if (u_b.dimension() != dim || u_s.dimension() != dim) {
    throw std::invalid_argument("transformed_residuals: unitary dimension mismatch");
  }
  const ExcitationImage image =
      excitation_map_forward(*state.basis, *excitation, state.vector, false);
  TransformedResiduals out;
  out.tail_weight = image.truncated_weight;
  out.flagged = out.tail_weight > kTailGate;

  const Eigen::Index vac = static_cast<Eigen::Index>(*excitation->reference_index());
  Eigen::VectorXd excited = image.vector;
  Eigen::VectorXd phi = u_s.apply(u_b.apply(excited));
  if (phi[vac] < 0.0) {
    phi = -phi;
    excited = -excited;
  }
  double number = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    number += phi[i] * phi[i] * excitation->excited_count(static_cast<std::size_t>(i));
  }
  out.phi_number = number;

  Eigen::VectorXd vacuum = Eigen::VectorXd::Zero(dim);
  vacuum[vac] = 1.0;
  const Eigen::VectorXd trial = u_b.apply_adjoint(u_s.apply_adjoint(vacuum));
  out.norm_gap = (excited - trial).squaredNorm();
  return out;
}

TransformedResiduals transformed_residuals(const GroundState& state, const ModelConfig& config) {
  config.validate();
  const BasisPtr excitation =
      enumerate_excitation(config.modes, config.excitation_cutoff, !config.full_space);
  const BogoliubovData bog = coefficients(config.potential, config.modes);
  const Unitary u_b(build_quadratic_generator(bog, excitation).matrix(), config.expm_tol,
                    ExpmMethod::automatic, config.rng_seed);
  const Unitary u_s(build_cubic_generator(config, bog, excitation).matrix(), config.expm_tol,
                    ExpmMethod::automatic, config.rng_seed);
  return transformed_residuals(state, excitation, u_b, u_s);
}

}  // namespace mfbog
