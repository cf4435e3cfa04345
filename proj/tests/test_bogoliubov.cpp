#include <doctest.h>

#include <cmath>

#include "mfbog/bogoliubov.h"
#include "oracles.h"

using namespace mfbog;
namespace frozen = oracle::frozen;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("free gas coefficients") {
  const ModeSet modes = build_mode_set(2, 2);
  const BogoliubovData bog = coefficients(Potential::zero(modes), modes);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i == modes.zero_index()) continue;
    CHECK(bog[i].alpha == 0.0);
    CHECK(bog[i].gamma == 0.0);
    CHECK(bog[i].sigma == 1.0);
    CHECK(bog[i].dispersion == doctest::Approx(modes.momentum_squared(i)).epsilon(1e-15));
  }
  CHECK(bog.energy() == 0.0);
  CHECK(bog.depletion() == 0.0);
}

TEST_CASE("single mode against high-precision values") {
  const ModeSet modes = build_mode_set(1, 1);
  const Potential w = Potential::from_pairs(modes, {{{1}, 1.0}});
  const BogoliubovData bog = coefficients(w, modes);
  const ModeCoefficients& c = bog[2];
  CHECK(rel(c.dispersion, frozen::dispersion_2pi) < 1e-14);
  CHECK(rel(c.alpha, frozen::alpha_2pi) < 1e-14);
  CHECK(std::abs(c.gamma * c.gamma - frozen::gamma_sq_2pi) < 1e-17);
  CHECK(rel(c.sigma, frozen::sigma_2pi) < 1e-14);
  CHECK(std::abs(c.beta - frozen::beta_2pi) < 1e-16);
  CHECK(std::abs(bog.energy() - frozen::e_bog_pair_2pi) < 1e-16);
  CHECK(std::abs(bog.depletion() - 2.0 * frozen::gamma_sq_2pi) < 1e-17);
  // evenness is exact
  CHECK(bog[0].alpha == bog[2].alpha);
  CHECK(bog[0].gamma == bog[2].gamma);
}

TEST_CASE("E_Bog on the n_max = 2 lattice") {
  const ModeSet modes = build_mode_set(1, 2);
  CHECK(std::abs(coefficients(Potential::uniform(modes, 1.0), modes).energy() -
                 frozen::e_bog_nmax2_w1) < 1e-15);
  CHECK(std::abs(coefficients(Potential::uniform(modes, 5.0), modes).energy() -
                 frozen::e_bog_nmax2_w5) < 1e-14);
}

TEST_CASE("closed-form identities on every mode") {
  const ModeSet modes = build_mode_set(2, 2);
  std::vector<double> coeff(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const Label& n = modes.label(i);
    coeff[i] = 7.0 / (1.0 + n[0] * n[0] + 2 * n[1] * n[1]);
  }
  const Potential w(modes, coeff);
  const BogoliubovData bog = coefficients(w, modes);
  double direct_form = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i == modes.zero_index()) continue;
    const ModeCoefficients& c = bog[i];
    const double p2 = modes.momentum_squared(i);
    CHECK(std::abs(c.sigma * c.sigma - c.gamma * c.gamma - 1.0) <= 1e-12);
    CHECK(std::abs(std::tanh(2.0 * c.beta) - c.alpha) <= 1e-12);
    CHECK(c.dispersion >= p2 - 1e-12);
    CHECK(c.dispersion <= p2 + w[i] + 1e-12);
    CHECK(c.alpha >= 0.0);
    CHECK(c.alpha < 1.0);
    direct_form += -0.5 * (p2 + w[i] - c.dispersion);
  }
  CHECK(std::abs(direct_form - bog.energy()) <= 1e-12);
  CHECK(bog.energy() <= 0.0);
  CHECK(bog.max_sigma() >= 1.0);
  CHECK(std::isfinite(bog.gamma_sum()));
}

TEST_CASE("gamma grows with the coupling") {
  const ModeSet modes = build_mode_set(1, 2);
  double previous = -1.0;
  for (int k = 0; k <= 20; ++k) {
    const double t = k / 20.0;
    const BogoliubovData bog = coefficients(Potential::uniform(modes, 3.0 * t), modes);
    CHECK(bog[3].gamma >= previous);
    previous = bog[3].gamma;
  }
}

TEST_CASE("density matrix prediction") {
  const ModeSet modes = build_mode_set(1, 1);
  const BogoliubovData free = coefficients(Potential::zero(modes), modes);
  const DensityMatrixPrediction p0 = predicted_density_matrix(free, 10);
  CHECK(p0.weights == std::vector<double>{0.0, 10.0, 0.0});
  CHECK(p0.trace == 10.0);

  const BogoliubovData bog = coefficients(Potential::from_pairs(modes, {{{1}, 1.0}}), modes);
  const DensityMatrixPrediction p = predicted_density_matrix(bog, 10);
  CHECK(std::abs(p.weights[0] - frozen::gamma_sq_2pi) < 1e-17);
  CHECK(std::abs(p.weights[2] - frozen::gamma_sq_2pi) < 1e-17);
  double sum = 0.0;
  for (double x : p.weights) sum += x;
  CHECK(std::abs(sum - 10.0) < 1e-14);
  CHECK(p.regime_valid);
  CHECK_THROWS_AS(predicted_density_matrix(bog, 1), std::invalid_argument);

  // a huge coupling pushes the depletion past N
  const BogoliubovData strong = coefficients(Potential::uniform(modes, 1e6), modes);
  CHECK_FALSE(predicted_density_matrix(strong, 2).regime_valid);
}

TEST_CASE("cubic kernel") {
  const ModeSet modes = build_mode_set(1, 2);
  const Potential w = Potential::from_pairs(modes, {{{1}, 1.0}, {{2}, 1.0}});
  const BogoliubovData bog = coefficients(w, modes);
  CHECK(std::abs(cubic_kernel(bog, w, modes, 3, 3) - frozen::eta_2pi_2pi) < 1e-18);

  const Potential zero = Potential::zero(modes);
  const BogoliubovData free = coefficients(zero, modes);
  CHECK(cubic_kernel(free, zero, modes, 3, 3) == 0.0);
  CHECK(kernel_l1_norm(free, zero, modes) == 0.0);

  // w(q) = w(p+q) = 0: both gamma factors vanish
  const Potential only_p = Potential::from_pairs(modes, {{{2}, 1.0}});
  const BogoliubovData b2 = coefficients(only_p, modes);
  CHECK(cubic_kernel(b2, only_p, modes, 0, 3) == 0.0);  // p = -2, q = 1, p+q = -1

  CHECK_THROWS_AS(cubic_kernel(bog, w, modes, 4, 3), std::out_of_range);    // 2 + 1 outside
  CHECK_THROWS_AS(cubic_kernel(bog, w, modes, 3, 1), std::invalid_argument); // p + q = 0
  CHECK_THROWS_AS(cubic_kernel(bog, w, modes, 2, 3), std::invalid_argument); // p = 0
}

TEST_CASE("kernel l1 norm") {
  // only the pair {+-2 pi}: no valid triple
  const ModeSet small = build_mode_set(1, 1);
  const Potential w1 = Potential::uniform(small, 1.0);
  CHECK(kernel_l1_norm(coefficients(w1, small), w1, small) == 0.0);

  // brute-force double loop straight from the closed forms
  const ModeSet modes = build_mode_set(1, 2);
  const Potential w = Potential::uniform(modes, 1.0);
  const BogoliubovData bog = coefficients(w, modes);
  auto closed = [](int n) {
    const double p2 = 4.0 * M_PI * M_PI * n * n;
    const double e = std::sqrt(p2 * p2 + 2.0 * p2);
    const double a = 1.0 / (p2 + 1.0 + e);
    return std::array<double, 3>{1.0 / std::sqrt(1 - a * a), a / std::sqrt(1 - a * a), e};
  };
  double expected = 0.0;
  for (int p = -2; p <= 2; ++p) {
    for (int q = -2; q <= 2; ++q) {
      if (p == 0 || q == 0 || p + q == 0 || std::abs(p + q) > 2) continue;
      const auto a = closed(p + q), b = closed(p), c = closed(q);
      expected += std::abs((a[1] * b[1] * c[0] - a[0] * b[0] * c[1]) / (a[2] + b[2] + c[2]));
    }
  }
  const double got = kernel_l1_norm(bog, w, modes);
  CHECK(got > 0.0);
  CHECK(std::abs(got - expected) <= 1e-15);
}
