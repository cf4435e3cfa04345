#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mfbog {

/// Integer lattice label n of a momentum p = 2*pi*n.
using Label = std::vector<int>;

/// Finite momentum lattice {2*pi*n : |n|_inf <= n_max} in d dimensions.
///
/// Modes are ordered lexicographically in n, so the ordering is a mixed-radix
/// count over coordinates in [-n_max, n_max]. With that ordering negation maps
/// index i to size()-1-i and the zero mode sits exactly in the middle.
class ModeSet {
 public:
  ModeSet(int dimension, int n_max);

  int dimension() const { return dimension_; }
  int n_max() const { return n_max_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t zero_index() const { return zero_index_; }

  const Label& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<Label>& labels() const { return labels_; }

  /// |p|^2 = (2 pi)^2 |n|^2.
  double momentum_squared(std::size_t i) const { return momentum_sq_.at(i); }

  std::size_t negate(std::size_t i) const { return size() - 1 - i; }

  /// Position of label n, or nullopt when n lies outside the cutoff.
  std::optional<std::size_t> find(std::span<const int> n) const;

  /// Index of n_i + n_j (resp. n_i - n_j) when it lies inside the set.
  std::optional<std::size_t> add(std::size_t i, std::size_t j) const;
  std::optional<std::size_t> subtract(std::size_t i, std::size_t j) const;

  bool same_lattice(const ModeSet& other) const {
    return dimension_ == other.dimension_ && n_max_ == other.n_max_;
  }

 private:
  int dimension_;
  int n_max_;
  std::vector<Label> labels_;
  std::vector<double> momentum_sq_;
  std::size_t zero_index_;
};

ModeSet build_mode_set(int dimension, int n_max);

/// Fourier coefficients w_hat(p) of an even, nonnegative interaction,
/// stored per mode of a ModeSet.
class Potential {
 public:
  /// Validates nonnegativity and evenness of a full coefficient vector.
  Potential(const ModeSet& modes, std::vector<double> coefficients);

  /// All-zero potential (free gas).
  static Potential zero(const ModeSet& modes);
  /// Same value on every mode of the set.
  static Potential uniform(const ModeSet& modes, double value);
  /// Builds from (label, value) pairs; the partner -n is filled in
  /// automatically and a conflicting explicit partner is rejected.
  static Potential from_pairs(const ModeSet& modes,
                              const std::vector<std::pair<Label, double>>& pairs);

  double operator[](std::size_t i) const { return coefficients_[i]; }
  double at_label(std::span<const int> n) const;
  std::span<const double> coefficients() const { return coefficients_; }
  std::size_t size() const { return coefficients_.size(); }
  double l1_norm() const { return l1_norm_; }
  double zero_mode() const { return coefficients_[zero_index_]; }
  bool is_zero() const { return l1_norm_ == 0.0; }

  int dimension() const { return dimension_; }
  int n_max() const { return n_max_; }
  bool compatible_with(const ModeSet& modes) const {
    return modes.dimension() == dimension_ && modes.n_max() == n_max_;
  }

 private:
  int dimension_;
  int n_max_;
  std::size_t zero_index_;
  std::vector<double> coefficients_;
  double l1_norm_;
};

/// w(x) = sum_p w_hat(p) cos(p.x) for x in the unit torus.
double evaluate_w(const Potential& potential, const ModeSet& modes,
                  std::span<const double> x);

/// Global run parameters shared by every downstream module.
struct ModelConfig {
  int particles = 2;
  ModeSet modes{1, 0};
  Potential potential{ModeSet{1, 0}, {0.0}};
  int excitation_cutoff = 1;
  double eigensolver_tol = 1e-10;
  double expm_tol = 1e-12;
  std::uint64_t rng_seed = 0;
  /// Enumerate every total momentum instead of the zero-momentum sector.
  bool full_space = false;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

}  // namespace mfbog
