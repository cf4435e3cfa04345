#include "mfbog/fock.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace mfbog {

std::size_t OccupationHash::operator()(const Occupation& occ) const noexcept {
  // FNV-1a over the 16-bit words
  std::size_t h = 1469598103934665603ull;
  for (std::uint16_t v : occ) {
    h ^= v;
    h *= 1099511628211ull;
  }
  return h;
}

SectorBasis::SectorBasis(SectorKind kind, ModeSet modes, int particle_bound,
                         bool momentum_restricted, std::vector<Occupation> states)
    : kind_(kind),
      modes_(std::move(modes)),
      particle_bound_(particle_bound),
      momentum_restricted_(momentum_restricted),
      states_(std::move(states)) {
  mode_slots_.assign(modes_.size(), std::nullopt);
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    if (kind_ == SectorKind::excitation && m == modes_.zero_index()) continue;
    mode_slots_[m] = slot_modes_.size();
    slot_modes_.push_back(m);
  }
  index_.reserve(states_.size());
  excited_.reserve(states_.size());
  totals_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const Occupation& occ = states_[i];
    if (occ.size() != slot_modes_.size()) {
      throw std::invalid_argument("occupation has wrong number of slots");
    }
    if (!index_.emplace(occ, i).second) {
      throw std::invalid_argument("duplicate occupation in sector basis");
    }
    int total = 0;
    int excited = 0;
    for (std::size_t s = 0; s < occ.size(); ++s) {
      total += occ[s];
      if (slot_modes_[s] != modes_.zero_index()) excited += occ[s];
    }
    totals_.push_back(total);
    excited_.push_back(excited);
  }
}

std::optional<std::size_t> SectorBasis::find(const Occupation& occ) const {
  const auto it = index_.find(occ);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> SectorBasis::mode_slot(std::size_t m) const {
  if (m >= mode_slots_.size()) return std::nullopt;
  return mode_slots_[m];
}

Label SectorBasis::total_momentum(const Occupation& occ) const {
  Label total(modes_.dimension(), 0);
  for (std::size_t s = 0; s < occ.size(); ++s) {
    if (occ[s] == 0) continue;
    const Label& n = modes_.label(slot_modes_[s]);
    for (int k = 0; k < modes_.dimension(); ++k) total[k] += occ[s] * n[k];
  }
  return total;
}

std::optional<std::size_t> SectorBasis::reference_index() const {
  Occupation ref(slot_modes_.size(), 0);
  if (kind_ == SectorKind::canonical) {
    ref[*mode_slots_[modes_.zero_index()]] = static_cast<std::uint16_t>(particle_bound_);
  }
  return find(ref);
}

namespace {

// Enumerates compositions of `total` particles over the slots in ascending
// lexicographic order, optionally keeping zero total momentum only.
class CompositionWalker {
 public:
  CompositionWalker(const ModeSet& modes, const std::vector<std::size_t>& slot_modes,
                    bool momentum_restricted, std::vector<Occupation>& out)
      : modes_(modes),
        slot_modes_(slot_modes),
        restricted_(momentum_restricted),
        out_(out),
        current_(slot_modes.size(), 0),
        momentum_(modes.dimension(), 0) {}

  void run(int total) {
    if (slot_modes_.empty()) {
      if (total == 0) out_.push_back(current_);
      return;
    }
    recurse(0, total);
  }

 private:
  void recurse(std::size_t slot, int remaining) {
    if (restricted_) {
      const long bound = static_cast<long>(remaining) * modes_.n_max();
      for (int k : momentum_) {
        if (std::labs(k) > bound) return;
      }
    }
    const Label& n = modes_.label(slot_modes_[slot]);
    if (slot + 1 == slot_modes_.size()) {
      shift(n, remaining);
      if (!restricted_ || is_zero_momentum()) {
        current_[slot] = static_cast<std::uint16_t>(remaining);
        out_.push_back(current_);
        current_[slot] = 0;
      }
      shift(n, -remaining);
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      current_[slot] = static_cast<std::uint16_t>(k);
      shift(n, k);
      recurse(slot + 1, remaining - k);
      shift(n, -k);
    }
    current_[slot] = 0;
  }

  void shift(const Label& n, int count) {
    for (std::size_t k = 0; k < momentum_.size(); ++k) momentum_[k] += count * n[k];
  }

  bool is_zero_momentum() const {
    return std::all_of(momentum_.begin(), momentum_.end(), [](int k) { return k == 0; });
  }

  const ModeSet& modes_;
  const std::vector<std::size_t>& slot_modes_;
  bool restricted_;
  std::vector<Occupation>& out_;
  Occupation current_;
  Label momentum_;
};

void check_occupation_range(int particles) {
  if (particles > std::numeric_limits<std::uint16_t>::max()) {
    throw std::invalid_argument("particle number exceeds occupation encoding range");
  }
}

}  // namespace

BasisPtr enumerate_canonical(const ModeSet& modes, int particles, bool momentum_restricted) {
  if (particles < 0) throw std::invalid_argument("particle number must be >= 0");
  check_occupation_range(particles);
  std::vector<std::size_t> slots(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) slots[m] = m;
  std::vector<Occupation> states;
  CompositionWalker(modes, slots, momentum_restricted, states).run(particles);
  return std::make_shared<const SectorBasis>(SectorKind::canonical, modes, particles,
                                             momentum_restricted, std::move(states));
}

BasisPtr enumerate_excitation(const ModeSet& modes, int cutoff, bool momentum_restricted) {
  if (cutoff < 0) throw std::invalid_argument("excitation cutoff must be >= 0");
  check_occupation_range(cutoff);
  std::vector<std::size_t> slots;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    if (m != modes.zero_index()) slots.push_back(m);
  }
  std::vector<Occupation> states;
  for (int total = 0; total <= cutoff; ++total) {
    CompositionWalker(modes, slots, momentum_restricted, states).run(total);
  }
  return std::make_shared<const SectorBasis>(SectorKind::excitation, modes, cutoff,
                                             momentum_restricted, std::move(states));
}

Label monomial_momentum(const ModeSet& modes, const Monomial& monomial) {
  Label total(modes.dimension(), 0);
  for (const Ladder& f : monomial) {
    const Label& n = modes.label(f.mode);
    const int sign = f.creation ? 1 : -1;
    for (int k = 0; k < modes.dimension(); ++k) total[k] += sign * n[k];
  }
  return total;
}

LadderImage apply_monomial(const SectorBasis& basis, const Occupation& state,
                           const Monomial& monomial) {
  LadderImage image{state, 1.0};
  for (auto it = monomial.rbegin(); it != monomial.rend(); ++it) {
    const auto slot = basis.mode_slot(it->mode);
    if (!slot) {
      throw std::invalid_argument("ladder operator on mode " + std::to_string(it->mode) +
                                  " not represented in this basis");
    }
    std::uint16_t& n = image.state[*slot];
    if (it->creation) {
      ++n;
      image.amplitude *= std::sqrt(static_cast<double>(n));
    } else {
      if (n == 0) {
        image.amplitude = 0.0;
        return image;
      }
      image.amplitude *= std::sqrt(static_cast<double>(n));
      --n;
    }
  }
  return image;
}

std::vector<Eigen::Triplet<double>> matrix_element_monomial(const SectorBasis& basis,
                                                            const Monomial& monomial,
                                                            double coefficient,
                                                            const NumberFunction& left,
                                                            const NumberFunction& right) {
  for (const Ladder& f : monomial) {
    if (f.mode >= basis.modes().size()) {
      throw std::invalid_argument("ladder mode index outside the mode set");
    }
    if (!basis.mode_slot(f.mode)) {
      throw std::invalid_argument("ladder operator on a mode this basis does not carry");
    }
  }
  std::vector<Eigen::Triplet<double>> entries;
  if (coefficient == 0.0) return entries;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const LadderImage image = apply_monomial(basis, basis.state(col), monomial);
    if (image.amplitude == 0.0) continue;
    const auto row = basis.find(image.state);
    if (!row) continue;
    double value = coefficient * image.amplitude;
    if (right) value *= right(basis.excited_count(col));
    if (left) value *= left(basis.excited_count(*row));
    if (value != 0.0) entries.emplace_back(static_cast<int>(*row), static_cast<int>(col), value);
  }
  return entries;
}

namespace {

Occupation drop_zero_mode(const SectorBasis& canonical, const Occupation& occ) {
  const std::size_t zero_slot = *canonical.mode_slot(canonical.modes().zero_index());
  Occupation out;
  out.reserve(occ.size() - 1);
  for (std::size_t s = 0; s < occ.size(); ++s) {
    if (s != zero_slot) out.push_back(occ[s]);
  }
  return out;
}

void require_matching(const SectorBasis& canonical, const SectorBasis& excitation) {
  if (canonical.kind() != SectorKind::canonical || excitation.kind() != SectorKind::excitation) {
    throw std::invalid_argument("excitation map needs a canonical and an excitation basis");
  }
  if (!canonical.modes().same_lattice(excitation.modes())) {
    throw std::invalid_argument("excitation map bases use different mode sets");
  }
}

}  // namespace

ExcitationImage excitation_map_forward(const SectorBasis& canonical,
                                       const SectorBasis& excitation,
                                       const Eigen::VectorXd& vector, bool strict) {
  require_matching(canonical, excitation);
  if (static_cast<std::size_t>(vector.size()) != canonical.size()) {
    throw std::invalid_argument("vector length does not match canonical basis");
  }
  ExcitationImage out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(excitation.size())), 0.0};
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    const double c = vector[static_cast<Eigen::Index>(i)];
    const auto target = excitation.find(drop_zero_mode(canonical, canonical.state(i)));
    if (!target) {
      if (c != 0.0 && strict) {
        throw TruncationError("excitation map: state with N_+ = " +
                              std::to_string(canonical.excited_count(i)) +
                              " exceeds the excitation cutoff");
      }
      out.truncated_weight += c * c;
      continue;
    }
    out.vector[static_cast<Eigen::Index>(*target)] = c;
  }
  return out;
}

ExcitationImage excitation_map_inverse(const SectorBasis& excitation,
                                       const SectorBasis& canonical,
                                       const Eigen::VectorXd& vector, bool strict) {
  require_matching(canonical, excitation);
  if (static_cast<std::size_t>(vector.size()) != excitation.size()) {
    throw std::invalid_argument("vector length does not match excitation basis");
  }
  const int particles = canonical.particle_bound();
  const std::size_t zero_slot = *canonical.mode_slot(canonical.modes().zero_index());
  ExcitationImage out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(canonical.size())), 0.0};
  for (std::size_t i = 0; i < excitation.size(); ++i) {
    const double c = vector[static_cast<Eigen::Index>(i)];
    const int excited = excitation.excited_count(i);
    std::optional<std::size_t> target;
    if (excited <= particles) {
      const Occupation& occ = excitation.state(i);
      Occupation full;
      full.reserve(occ.size() + 1);
      for (std::size_t s = 0, k = 0; s <= occ.size(); ++s) {
        if (s == zero_slot) {
          full.push_back(static_cast<std::uint16_t>(particles - excited));
        } else {
          full.push_back(occ[k++]);
        }
      }
      target = canonical.find(full);
    }
    if (!target) {
      if (c != 0.0 && strict) {
        throw TruncationError("inverse excitation map: state has no N-particle preimage");
      }
      out.truncated_weight += c * c;
      continue;
    }
    out.vector[static_cast<Eigen::Index>(*target)] = c;
  }
  return out;
}

Eigen::MatrixXd conjugate_by_excitation_map(const SectorBasis& canonical,
                                            const SectorBasis& excitation,
                                            const Eigen::SparseMatrix<double>& op) {
  require_matching(canonical, excitation);
  const auto n = static_cast<Eigen::Index>(canonical.size());
  if (op.rows() != n || op.cols() != n) {
    throw std::invalid_argument("operator does not act on the canonical basis");
  }
  std::vector<std::optional<std::size_t>> image(canonical.size());
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    image[i] = excitation.find(drop_zero_mode(canonical, canonical.state(i)));
  }
  const auto m = static_cast<Eigen::Index>(excitation.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index col = 0; col < op.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(op, col); it; ++it) {
      const auto& r = image[static_cast<std::size_t>(it.row())];
      const auto& c = image[static_cast<std::size_t>(it.col())];
      if (r && c) {
        out(static_cast<Eigen::Index>(*r), static_cast<Eigen::Index>(*c)) += it.value();
      }
    }
  }
  return out;
}

}  // namespace mfbog
