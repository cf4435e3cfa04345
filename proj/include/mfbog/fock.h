#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mfbog/errors.h"
#include "mfbog/model.h"

namespace mfbog {

/// Occupation numbers, one slot per mode represented in a basis.
using Occupation = std::vector<std::uint16_t>;

struct OccupationHash {
  std::size_t operator()(const Occupation& occ) const noexcept;
};

enum class SectorKind { canonical, excitation };

/// Deterministically ordered occupation-number basis of one particle sector.
///
/// A canonical basis has exactly N particles over every mode; an excitation
/// basis has at most M particles over the nonzero modes and always contains
/// the vacuum at index 0. With `momentum_restricted` set only states of zero
/// total momentum are enumerated.
class SectorBasis {
 public:
  SectorBasis(SectorKind kind, ModeSet modes, int particle_bound, bool momentum_restricted,
              std::vector<Occupation> states);

  SectorKind kind() const { return kind_; }
  const ModeSet& modes() const { return modes_; }
  int particle_bound() const { return particle_bound_; }
  bool momentum_restricted() const { return momentum_restricted_; }

  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const Occupation& state(std::size_t i) const { return states_.at(i); }
  const std::vector<Occupation>& states() const { return states_; }
  std::optional<std::size_t> find(const Occupation& occ) const;

  /// Number of slots per state (modes for canonical, nonzero modes otherwise).
  std::size_t slots() const { return slot_modes_.size(); }
  /// ModeSet index of slot s.
  std::size_t slot_mode(std::size_t s) const { return slot_modes_[s]; }
  /// Slot of ModeSet index m, or nullopt (the zero mode in an excitation basis).
  std::optional<std::size_t> mode_slot(std::size_t m) const;

  /// Number of excited particles N_+ of state i.
  int excited_count(std::size_t i) const { return excited_[i]; }
  int total_count(std::size_t i) const { return totals_[i]; }
  /// Total momentum label sum_p n_p * label(p).
  Label total_momentum(const Occupation& occ) const;

  /// Index of the reference state: the full condensate (canonical) or the
  /// vacuum (excitation); nullopt when it is not part of the basis.
  std::optional<std::size_t> reference_index() const;

 private:
  SectorKind kind_;
  ModeSet modes_;
  int particle_bound_;
  bool momentum_restricted_;
  std::vector<Occupation> states_;
  std::unordered_map<Occupation, std::size_t, OccupationHash> index_;
  std::vector<std::size_t> slot_modes_;
  std::vector<std::optional<std::size_t>> mode_slots_;
  std::vector<int> excited_;
  std::vector<int> totals_;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

/// All occupations with sum n_p = N (and zero total momentum unless
/// `momentum_restricted` is false), in ascending lexicographic order.
BasisPtr enumerate_canonical(const ModeSet& modes, int particles,
                             bool momentum_restricted = true);

/// All occupations of the nonzero modes with sum n_p <= M (and zero total
/// momentum unless disabled), ordered by particle number, then lexicographically.
BasisPtr enumerate_excitation(const ModeSet& modes, int cutoff,
                              bool momentum_restricted = true);

/// One ladder factor a*_p (creation) or a_p.
struct Ladder {
  bool creation;
  std::size_t mode;  // ModeSet index
};

inline Ladder create(std::size_t mode) { return {true, mode}; }
inline Ladder annihilate(std::size_t mode) { return {false, mode}; }

/// Product of ladder factors, leftmost first (applied right to left).
using Monomial = std::vector<Ladder>;

/// Total momentum transferred by a monomial (creations minus annihilations).
Label monomial_momentum(const ModeSet& modes, const Monomial& monomial);

/// Result of applying a monomial to one occupation.
struct LadderImage {
  Occupation state;
  double amplitude = 0.0;  // zero when annihilated
};

/// Applies the monomial with amplitudes sqrt(n) / sqrt(n+1). Throws
/// std::invalid_argument for modes the basis does not represent.
LadderImage apply_monomial(const SectorBasis& basis, const Occupation& state,
                           const Monomial& monomial);

/// Function of N_+ multiplying a monomial on the left (target) or right (source).
using NumberFunction = std::function<double(int)>;

/// Sparse matrix of coefficient * left(N_+) * monomial * right(N_+) in the
/// basis. Images leaving the basis are dropped (projection semantics).
std::vector<Eigen::Triplet<double>> matrix_element_monomial(
    const SectorBasis& basis, const Monomial& monomial, double coefficient,
    const NumberFunction& left = {}, const NumberFunction& right = {});

struct ExcitationImage {
  Eigen::VectorXd vector;
  /// Squared norm of the components that had no image in the target basis.
  double truncated_weight = 0.0;
};

/// U_N in occupation coordinates: (n_0, (n_p)_{p!=0}) -> (n_p)_{p!=0}, with
/// unchanged amplitudes. With `strict` set a nonzero amplitude on a state
/// whose excitation number exceeds the cutoff throws TruncationError.
ExcitationImage excitation_map_forward(const SectorBasis& canonical,
                                       const SectorBasis& excitation,
                                       const Eigen::VectorXd& vector, bool strict = true);

/// U_N^*: restores n_0 = N - N_+; states with N_+ > N have no preimage.
ExcitationImage excitation_map_inverse(const SectorBasis& excitation,
                                       const SectorBasis& canonical,
                                       const Eigen::VectorXd& vector, bool strict = true);

/// U_N A U_N^* restricted to excitation states with N_+ <= min(N, M): an
/// exact relabelling of the canonical matrix elements.
Eigen::MatrixXd conjugate_by_excitation_map(const SectorBasis& canonical,
                                            const SectorBasis& excitation,
                                            const Eigen::SparseMatrix<double>& op);

}  // namespace mfbog
