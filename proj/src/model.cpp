#include "mfbog/model.h"

#include <cmath>
#include <numbers>
#include <string>

namespace mfbog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

ModeSet::ModeSet(int dimension, int n_max) : dimension_(dimension), n_max_(n_max) {
  if (dimension < 1) {
    throw std::invalid_argument("mode set dimension must be >= 1, got " +
                                std::to_string(dimension));
  }
  if (n_max < 0) {
    throw std::invalid_argument("mode set n_max must be >= 0, got " +
                                std::to_string(n_max));
  }
  const int side = 2 * n_max + 1;
  std::size_t count = 1;
  for (int k = 0; k < dimension; ++k) count *= static_cast<std::size_t>(side);

  labels_.reserve(count);
  momentum_sq_.reserve(count);
  Label n(dimension, -n_max);
  for (std::size_t i = 0; i < count; ++i) {
    labels_.push_back(n);
    double norm2 = 0.0;
    for (int c : n) norm2 += static_cast<double>(c) * c;
    momentum_sq_.push_back(kTwoPi * kTwoPi * norm2);
    // odometer increment, last coordinate fastest
    for (int k = dimension - 1; k >= 0; --k) {
      if (++n[k] <= n_max) break;
      n[k] = -n_max;
    }
  }
  zero_index_ = (count - 1) / 2;
}

std::optional<std::size_t> ModeSet::find(std::span<const int> n) const {
  if (n.size() != static_cast<std::size_t>(dimension_)) return std::nullopt;
  const std::size_t side = 2 * static_cast<std::size_t>(n_max_) + 1;
  std::size_t index = 0;
  for (int c : n) {
    if (c < -n_max_ || c > n_max_) return std::nullopt;
    index = index * side + static_cast<std::size_t>(c + n_max_);
  }
  return index;
}

std::optional<std::size_t> ModeSet::add(std::size_t i, std::size_t j) const {
  Label sum(labels_.at(i));
  const Label& b = labels_.at(j);
  for (int k = 0; k < dimension_; ++k) sum[k] += b[k];
  return find(sum);
}

std::optional<std::size_t> ModeSet::subtract(std::size_t i, std::size_t j) const {
  return add(i, negate(j));
}

ModeSet build_mode_set(int dimension, int n_max) { return ModeSet(dimension, n_max); }

Potential::Potential(const ModeSet& modes, std::vector<double> coefficients)
    : dimension_(modes.dimension()),
      n_max_(modes.n_max()),
      zero_index_(modes.zero_index()),
      coefficients_(std::move(coefficients)),
      l1_norm_(0.0) {
  if (coefficients_.size() != modes.size()) {
    throw std::invalid_argument("potential has " + std::to_string(coefficients_.size()) +
                                " coefficients for a mode set of size " +
                                std::to_string(modes.size()));
  }
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    const double v = coefficients_[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("w_hat must be finite and nonnegative (mode " +
                                  std::to_string(i) + ")");
    }
    if (v != coefficients_[modes.negate(i)]) {
      throw std::invalid_argument("w_hat must be even: w_hat(p) != w_hat(-p) at mode " +
                                  std::to_string(i));
    }
    l1_norm_ += v;
  }
}

Potential Potential::zero(const ModeSet& modes) {
  return Potential(modes, std::vector<double>(modes.size(), 0.0));
}

Potential Potential::uniform(const ModeSet& modes, double value) {
  return Potential(modes, std::vector<double>(modes.size(), value));
}

Potential Potential::from_pairs(const ModeSet& modes,
                                const std::vector<std::pair<Label, double>>& pairs) {
  std::vector<double> values(modes.size(), 0.0);
  std::vector<bool> explicit_set(modes.size(), false);
  for (const auto& [label, value] : pairs) {
    const auto index = modes.find(label);
    if (!index) {
      throw std::invalid_argument("w_hat label outside the mode set");
    }
    if (explicit_set[*index] && values[*index] != value) {
      throw std::invalid_argument("w_hat given twice with different values for one mode");
    }
    values[*index] = value;
    explicit_set[*index] = true;
  }
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::size_t partner = modes.negate(i);
    if (!explicit_set[i]) continue;
    if (explicit_set[partner] && values[partner] != values[i]) {
      throw std::invalid_argument(
          "w_hat evenness violated: explicit values for n and -n differ");
    }
    values[partner] = values[i];
  }
  return Potential(modes, std::move(values));
}

double Potential::at_label(std::span<const int> n) const {
  if (n.size() != static_cast<std::size_t>(dimension_)) return 0.0;
  const std::size_t side = 2 * static_cast<std::size_t>(n_max_) + 1;
  std::size_t index = 0;
  for (int c : n) {
    if (c < -n_max_ || c > n_max_) return 0.0;
    index = index * side + static_cast<std::size_t>(c + n_max_);
  }
  return coefficients_[index];
}

double evaluate_w(const Potential& potential, const ModeSet& modes,
                  std::span<const double> x) {
  if (!potential.compatible_with(modes)) {
    throw std::invalid_argument("potential and mode set differ");
  }
  if (x.size() != static_cast<std::size_t>(modes.dimension())) {
    throw std::invalid_argument("position has wrong dimension");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double w = potential[i];
    if (w == 0.0) continue;
    const Label& n = modes.label(i);
    double phase = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) phase += n[k] * x[k];
    total += w * std::cos(kTwoPi * phase);
  }
  return total;
}

void ModelConfig::validate() const {
  if (particles < 2) {
    throw std::invalid_argument("N must be >= 2, got " + std::to_string(particles));
  }
  if (excitation_cutoff < 1) {
    throw std::invalid_argument("excitation_cutoff must be >= 1");
  }
  if (!(eigensolver_tol > 0.0) || !(expm_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (!potential.compatible_with(modes)) {
    throw std::invalid_argument("potential was built for a different mode set");
  }
}

}  // namespace mfbog
