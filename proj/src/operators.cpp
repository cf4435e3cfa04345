#include "mfbog/operators.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace mfbog {

namespace {

void require_kind(const BasisPtr& basis, SectorKind kind, const ModelConfig& config,
                  const char* what) {
  if (!basis) throw std::invalid_argument(std::string(what) + ": null basis");
  if (basis->kind() != kind) {
    throw std::invalid_argument(std::string(what) + ": wrong basis kind");
  }
  if (!basis->modes().same_lattice(config.modes)) {
    throw std::invalid_argument(std::string(what) + ": basis uses a different mode set");
  }
}

void require_particles(int particles, const char* what) {
  if (particles < 2) {
    throw std::invalid_argument(std::string(what) + ": needs N >= 2");
  }
}

}  // namespace

OperatorRecipe hamiltonian_recipe(const ModelConfig& config) {
  require_particles(config.particles, "H_N");
  const ModeSet& modes = config.modes;
  const Potential& w = config.potential;
  OperatorRecipe recipe(modes, "H_N");
  for (std::size_t p = 0; p < modes.size(); ++p) {
    recipe.add(modes.momentum_squared(p), {create(p), annihilate(p)});
  }
  const double scale = 1.0 / (2.0 * (config.particles - 1));
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (w[k] == 0.0) continue;
    for (std::size_t p = 0; p < modes.size(); ++p) {
      const auto pk = modes.subtract(p, k);
      if (!pk) continue;
      for (std::size_t q = 0; q < modes.size(); ++q) {
        const auto qk = modes.add(q, k);
        if (!qk) continue;
        recipe.add(scale * w[k], {create(*pk), create(*qk), annihilate(p), annihilate(q)});
      }
    }
  }
  return recipe;
}

SparseOperator build_HN(const ModelConfig& config, const BasisPtr& canonical) {
  require_kind(canonical, SectorKind::canonical, config, "H_N");
  if (canonical->particle_bound() != config.particles) {
    throw std::invalid_argument("H_N: basis particle number differs from config");
  }
  return hamiltonian_recipe(config).assemble(canonical, Symmetry::hermitian);
}

OperatorRecipe bogoliubov_recipe(const ModelConfig& config) {
  const ModeSet& modes = config.modes;
  const Potential& w = config.potential;
  OperatorRecipe recipe(modes, "H_Bog");
  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (p == modes.zero_index()) continue;
    recipe.add(modes.momentum_squared(p) + w[p], {create(p), annihilate(p)});
    recipe.add_with_adjoint(0.5 * w[p], {create(p), create(modes.negate(p))});
  }
  return recipe;
}

SparseOperator build_HBog(const ModelConfig& config, const BasisPtr& excitation) {
  require_kind(excitation, SectorKind::excitation, config, "H_Bog");
  return bogoliubov_recipe(config).assemble(excitation, Symmetry::hermitian);
}

OperatorRecipe excitation_hamiltonian_recipe(const ModelConfig& config) {
  require_particles(config.particles, "G_N");
  const ModeSet& modes = config.modes;
  const Potential& w = config.potential;
  const std::size_t zero = modes.zero_index();
  const double n = config.particles;

  OperatorRecipe recipe = bogoliubov_recipe(config);

  // N_+ (1 - N_+) w(0) / (2(N-1)), diagonal: written as a function on the identity
  const double w0 = w.zero_mode();
  if (w0 != 0.0) {
    recipe.add(1.0, {}, {}, [w0, n](int m) { return m * (1.0 - m) * w0 / (2.0 * (n - 1.0)); });
  }

  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (p == zero || w[p] == 0.0) continue;
    // (1 - N_+) w(p) a*_p a_p / (N-1)
    recipe.add(w[p] / (n - 1.0), {create(p), annihilate(p)},
               [](int m) { return 1.0 - m; });
    // 1/2 w(p) a*_p a*_{-p} (1 - 2 N_+)/(2N) + h.c.
    recipe.add_with_adjoint(0.5 * w[p] / (2.0 * n), {create(p), create(modes.negate(p))}, {},
                            [](int m) { return 1.0 - 2.0 * m; });
  }

  // N^{-1/2} sum w(l) a*_{p+l} a*_{-l} a_p + h.c.
  const double cubic = 1.0 / std::sqrt(n);
  for (std::size_t l = 0; l < modes.size(); ++l) {
    if (l == zero || w[l] == 0.0) continue;
    for (std::size_t p = 0; p < modes.size(); ++p) {
      if (p == zero) continue;
      const auto pl = modes.add(p, l);
      if (!pl || *pl == zero) continue;
      recipe.add_with_adjoint(cubic * w[l],
                              {create(*pl), create(modes.negate(l)), annihilate(p)});
    }
  }

  // (2(N-1))^{-1} sum w(l) a*_{p+l} a*_{k-l} a_p a_k, l = 0 allowed
  const double quartic = 1.0 / (2.0 * (n - 1.0));
  for (std::size_t l = 0; l < modes.size(); ++l) {
    if (w[l] == 0.0) continue;
    for (std::size_t p = 0; p < modes.size(); ++p) {
      if (p == zero) continue;
      const auto pl = modes.add(p, l);
      if (!pl || *pl == zero) continue;
      for (std::size_t k = 0; k < modes.size(); ++k) {
        if (k == zero) continue;
        const auto kl = modes.subtract(k, l);
        if (!kl || *kl == zero) continue;
        recipe.add(quartic * w[l], {create(*pl), create(*kl), annihilate(p), annihilate(k)});
      }
    }
  }
  return recipe;
}

SparseOperator build_GN(const ModelConfig& config, const BasisPtr& excitation) {
  require_kind(excitation, SectorKind::excitation, config, "G_N");
  return excitation_hamiltonian_recipe(config).assemble(excitation, Symmetry::hermitian);
}

namespace {

// Visits every (p, q) with p, q, p+q nonzero and inside the mode set.
template <typename Visit>
void for_each_triple(const ModeSet& modes, Visit&& visit) {
  const std::size_t zero = modes.zero_index();
  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (p == zero) continue;
    for (std::size_t q = 0; q < modes.size(); ++q) {
      if (q == zero) continue;
      const auto pq = modes.add(p, q);
      if (!pq || *pq == zero) continue;
      visit(p, q, *pq);
    }
  }
}

}  // namespace

SparseOperator build_CN(const ModelConfig& config, const BogoliubovData& bog,
                        const BasisPtr& excitation) {
  require_kind(excitation, SectorKind::excitation, config, "C_N");
  require_particles(config.particles, "C_N");
  const ModeSet& modes = config.modes;
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.particles));
  OperatorRecipe recipe(modes, "C_N");
  for_each_triple(modes, [&](std::size_t p, std::size_t q, std::size_t pq) {
    const double c = cubic_coefficient(bog, config.potential, modes, p, q);
    recipe.add_with_adjoint(scale * c,
                            {create(pq), create(modes.negate(p)), create(modes.negate(q))});
  });
  return recipe.assemble(excitation, Symmetry::hermitian);
}

SparseOperator build_dispersion(const BogoliubovData& bog, const BasisPtr& excitation) {
  const ModeSet& modes = excitation->modes();
  OperatorRecipe recipe(modes, "dGamma(e)");
  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (p == modes.zero_index()) continue;
    recipe.add(bog[p].dispersion, {create(p), annihilate(p)});
  }
  return recipe.assemble(excitation, Symmetry::hermitian);
}

SparseOperator build_number_operator(const BasisPtr& basis) {
  const auto n = static_cast<Eigen::Index>(basis->size());
  Eigen::SparseMatrix<double> diag(n, n);
  diag.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int count = basis->excited_count(static_cast<std::size_t>(i));
    if (count != 0) diag.insert(i, i) = count;
  }
  return SparseOperator(basis, std::move(diag), Symmetry::hermitian);
}

SparseOperator build_quadratic_generator(const BogoliubovData& bog,
                                         const BasisPtr& excitation) {
  const ModeSet& modes = excitation->modes();
  OperatorRecipe recipe(modes, "B");
  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (p == modes.zero_index()) continue;
    recipe.add_minus_adjoint(bog[p].beta, {create(p), create(modes.negate(p))});
  }
  return recipe.assemble(excitation, Symmetry::anti_hermitian);
}

SparseOperator build_cubic_generator(const ModelConfig& config, const BogoliubovData& bog,
                                     const BasisPtr& excitation, bool particle_cutoff) {
  require_kind(excitation, SectorKind::excitation, config, "S");
  require_particles(config.particles, "S");
  const ModeSet& modes = config.modes;
  const int n = config.particles;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  NumberFunction indicator;
  if (particle_cutoff) indicator = [n](int m) { return m <= n ? 1.0 : 0.0; };
  OperatorRecipe recipe(modes, "S");
  for_each_triple(modes, [&](std::size_t p, std::size_t q, std::size_t pq) {
    const double eta = cubic_kernel(bog, config.potential, modes, p, q);
    recipe.add_minus_adjoint(scale * eta,
                             {create(pq), create(modes.negate(p)), create(modes.negate(q))},
                             {}, indicator);
  });
  return recipe.assemble(excitation, Symmetry::anti_hermitian);
}

Eigen::MatrixXd conjugate(const Eigen::MatrixXd& op, const Unitary& u) {
  if (op.rows() != u.dimension() || op.cols() != u.dimension()) {
    throw std::invalid_argument("conjugate: dimension mismatch");
  }
  // U A U^T = (U (U A)^T)^T
  const Eigen::MatrixXd ua = u.apply(op);
  return u.apply(Eigen::MatrixXd(ua.transpose())).transpose();
}

Eigen::MatrixXd conjugate(const SparseOperator& op, const Unitary& u) {
  return conjugate(op.dense(), u);
}

double vacuum_expectation(const SparseOperator& op) {
  const auto ref = op.basis().reference_index();
  if (!ref) throw std::invalid_argument("basis has no reference state");
  const auto i = static_cast<Eigen::Index>(*ref);
  return op.matrix().coeff(i, i);
}

double vacuum_expectation(const Eigen::MatrixXd& op, const SectorBasis& basis) {
  if (op.rows() != static_cast<Eigen::Index>(basis.size())) {
    throw std::invalid_argument("vacuum_expectation: dimension mismatch");
  }
  const auto ref = basis.reference_index();
  if (!ref) throw std::invalid_argument("basis has no reference state");
  const auto i = static_cast<Eigen::Index>(*ref);
  return op(i, i);
}

Eigen::MatrixXd commutator(const SparseOperator& a, const SparseOperator& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("commutator: dimension mismatch");
  }
  const Eigen::SparseMatrix<double> ab = a.matrix() * b.matrix();
  const Eigen::SparseMatrix<double> ba = b.matrix() * a.matrix();
  return Eigen::MatrixXd(ab - ba);
}

OnsagerReport onsager_check(const Potential& potential, const ModeSet& modes, int particles,
                            int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("onsager_check: samples must be >= 1");
  require_particles(particles, "onsager_check");
  if (!potential.compatible_with(modes)) {
    throw std::invalid_argument("onsager_check: potential was built for a different mode set");
  }
  const int d = modes.dimension();
  const double n = particles;
  std::vector<double> origin(d, 0.0);
  const double w_at_zero = evaluate_w(potential, modes, origin);
  const double floor = n * potential.zero_mode() / 2.0 - n * w_at_zero / (n - 1.0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(particles * d));
  std::vector<double> diff(d);
  OnsagerReport report;
  report.samples = samples;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    for (double& c : x) c = unit(rng);
    double pair_sum = 0.0;
    for (int i = 0; i < particles; ++i) {
      for (int j = i + 1; j < particles; ++j) {
        for (int c = 0; c < d; ++c) diff[c] = x[i * d + c] - x[j * d + c];
        pair_sum += evaluate_w(potential, modes, diff);
      }
    }
    report.min_slack = std::min(report.min_slack, pair_sum / (n - 1.0) - floor);
  }
  report.passed = report.min_slack >= -1e-9;
  return report;
}

}  // namespace mfbog
