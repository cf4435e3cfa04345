#pragma once

#include <cstddef>
#include <vector>

#include "mfbog/model.h"

namespace mfbog {

/// Closed-form Bogoliubov quantities of a single mode p != 0.
///
/// The squeeze angle of the pair (p, -p) is 2*beta because the quadratic
/// generator sums over both p and -p; sigma = cosh(2 beta) = 1/sqrt(1-alpha^2)
/// and gamma = sinh(2 beta) = alpha/sqrt(1-alpha^2).
struct ModeCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double sigma = 1.0;
  double gamma = 0.0;
  double dispersion = 0.0;  // e_p = sqrt(p^4 + 2 p^2 w_hat(p))
};

class BogoliubovData {
 public:
  BogoliubovData(std::vector<ModeCoefficients> modes, std::size_t zero_index,
                 double energy, double depletion);

  /// Per-mode coefficients indexed like the ModeSet; the zero mode holds the
  /// neutral entry (alpha = gamma = 0, sigma = 1, e = 0).
  const ModeCoefficients& operator[](std::size_t i) const { return modes_[i]; }
  std::size_t size() const { return modes_.size(); }
  std::size_t zero_index() const { return zero_index_; }

  /// E_Bog = -1/2 sum_{p != 0} (p^2 + w_hat(p) - e_p).
  double energy() const { return energy_; }
  /// sum_{p != 0} gamma_p^2.
  double depletion() const { return depletion_; }

  double max_sigma() const;
  double gamma_sum() const;

 private:
  std::vector<ModeCoefficients> modes_;
  std::size_t zero_index_;
  double energy_;
  double depletion_;
};

/// Single-mode closed forms from p^2 and w_hat(p).
ModeCoefficients mode_coefficients(double momentum_squared, double w_hat);

BogoliubovData coefficients(const Potential& potential, const ModeSet& modes);

struct DensityMatrixPrediction {
  /// Weight per mode: N - D on the zero mode, gamma_p^2 elsewhere.
  std::vector<double> weights;
  double trace = 0.0;
  /// False when D >= N, i.e. the expansion is outside its regime.
  bool regime_valid = true;
};

DensityMatrixPrediction predicted_density_matrix(const BogoliubovData& bog, int particles);

/// eta_{p,q} for p, q, p+q != 0, all inside the mode set. Throws
/// std::out_of_range when p+q leaves the set and std::invalid_argument for a
/// vanishing momentum.
///
/// The odd-in-gamma term carries the sign of U_B a_p U_B* = sigma a_p - gamma a*_{-p}:
///   eta = w(p) (gamma_{p+q} gamma_p sigma_q - sigma_{p+q} sigma_p gamma_q)
///         / (e_{p+q} + e_p + e_q).
double cubic_kernel(const BogoliubovData& bog, const Potential& potential,
                    const ModeSet& modes, std::size_t p, std::size_t q);

/// Numerator of the cubic kernel without the energy denominator; this is the
/// coefficient of a*_{p+q} a*_{-p} a*_{-q} in the cubic term C_N (up to N^{-1/2}).
double cubic_coefficient(const BogoliubovData& bog, const Potential& potential,
                         const ModeSet& modes, std::size_t p, std::size_t q);

/// sum over valid (p, q) of |eta_{p,q}|.
double kernel_l1_norm(const BogoliubovData& bog, const Potential& potential,
                      const ModeSet& modes);

}  // namespace mfbog
