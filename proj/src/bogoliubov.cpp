#include "mfbog/bogoliubov.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfbog {

namespace {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

void require_valid_triple(const ModeSet& modes, std::size_t p, std::size_t q,
                          std::size_t& pq) {
  const std::size_t zero = modes.zero_index();
  if (p >= modes.size() || q >= modes.size()) {
    throw std::out_of_range("cubic kernel: mode index out of range");
  }
  if (p == zero || q == zero) {
    throw std::invalid_argument("cubic kernel: p and q must be nonzero");
  }
  const auto sum = modes.add(p, q);
  if (!sum) throw std::out_of_range("cubic kernel: p+q outside the mode set");
  if (*sum == zero) throw std::invalid_argument("cubic kernel: p+q must be nonzero");
  pq = *sum;
}

}  // namespace

BogoliubovData::BogoliubovData(std::vector<ModeCoefficients> modes, std::size_t zero_index,
                               double energy, double depletion)
    : modes_(std::move(modes)),
      zero_index_(zero_index),
      energy_(energy),
      depletion_(depletion) {}

double BogoliubovData::max_sigma() const {
  double best = 1.0;
  for (const auto& m : modes_) best = std::max(best, m.sigma);
  return best;
}

double BogoliubovData::gamma_sum() const {
  double total = 0.0;
  for (const auto& m : modes_) total += m.gamma;
  return total;
}

ModeCoefficients mode_coefficients(double momentum_squared, double w_hat) {
  ModeCoefficients c;
  const double p2 = momentum_squared;
  c.dispersion = std::sqrt(p2 * p2 + 2.0 * p2 * w_hat);
  c.alpha = w_hat / (p2 + w_hat + c.dispersion);
  c.beta = 0.5 * std::atanh(c.alpha);
  c.sigma = std::cosh(2.0 * c.beta);
  c.gamma = std::sinh(2.0 * c.beta);

  // second route through the algebraic forms
  const double root = std::sqrt(1.0 - c.alpha * c.alpha);
  const double sigma_alg = 1.0 / root;
  const double gamma_alg = c.alpha / root;
  if (std::abs(sigma_alg - c.sigma) > 1e-12 * sigma_alg ||
      std::abs(gamma_alg - c.gamma) > 1e-12 * std::max(1.0, gamma_alg)) {
    throw std::logic_error("Bogoliubov coefficient routes disagree");
  }
  return c;
}

BogoliubovData coefficients(const Potential& potential, const ModeSet& modes) {
  if (!potential.compatible_with(modes)) {
    throw std::invalid_argument("potential was built for a different mode set");
  }
  std::vector<ModeCoefficients> per_mode(modes.size());
  CompensatedSum energy;
  CompensatedSum depletion;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i == modes.zero_index()) continue;
    const double p2 = modes.momentum_squared(i);
    const double w = potential[i];
    per_mode[i] = mode_coefficients(p2, w);
    // (p^2 + w - e) rationalized: ((p^2+w)^2 - e^2) / (p^2 + w + e) = w^2 / (...)
    energy.add(-0.5 * w * w / (p2 + w + per_mode[i].dispersion));
    depletion.add(per_mode[i].gamma * per_mode[i].gamma);
  }
  return BogoliubovData(std::move(per_mode), modes.zero_index(), energy.value(),
                        depletion.value());
}

DensityMatrixPrediction predicted_density_matrix(const BogoliubovData& bog, int particles) {
  if (particles < 2) {
    throw std::invalid_argument("density matrix prediction needs N >= 2");
  }
  DensityMatrixPrediction out;
  out.weights.assign(bog.size(), 0.0);
  const double depletion = bog.depletion();
  for (std::size_t i = 0; i < bog.size(); ++i) {
    if (i == bog.zero_index()) continue;
    out.weights[i] = bog[i].gamma * bog[i].gamma;
  }
  out.weights[bog.zero_index()] = static_cast<double>(particles) - depletion;
  out.trace = static_cast<double>(particles);
  out.regime_valid = depletion < static_cast<double>(particles);
  return out;
}

double cubic_coefficient(const BogoliubovData& bog, const Potential& potential,
                         const ModeSet& modes, std::size_t p, std::size_t q) {
  std::size_t pq = 0;
  require_valid_triple(modes, p, q, pq);
  const auto& a = bog[pq];
  const auto& b = bog[p];
  const auto& c = bog[q];
  return potential[p] * (a.gamma * b.gamma * c.sigma - a.sigma * b.sigma * c.gamma);
}

double cubic_kernel(const BogoliubovData& bog, const Potential& potential,
                    const ModeSet& modes, std::size_t p, std::size_t q) {
  const double numerator = cubic_coefficient(bog, potential, modes, p, q);
  if (numerator == 0.0) return 0.0;
  const std::size_t pq = *modes.add(p, q);
  return numerator / (bog[pq].dispersion + bog[p].dispersion + bog[q].dispersion);
}

double kernel_l1_norm(const BogoliubovData& bog, const Potential& potential,
                      const ModeSet& modes) {
  CompensatedSum total;
  const std::size_t zero = modes.zero_index();
  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (p == zero) continue;
    for (std::size_t q = 0; q < modes.size(); ++q) {
      if (q == zero) continue;
      const auto pq = modes.add(p, q);
      if (!pq || *pq == zero) continue;
      total.add(std::abs(cubic_kernel(bog, potential, modes, p, q)));
    }
  }
  return total.value();
}

}  // namespace mfbog
