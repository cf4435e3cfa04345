#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "mfbog/model.h"

using namespace mfbog;

TEST_CASE("mode set sizes and ordering") {
  const ModeSet trivial = build_mode_set(1, 0);
  CHECK(trivial.size() == 1);
  CHECK(trivial.zero_index() == 0);

  const ModeSet line = build_mode_set(1, 2);
  REQUIRE(line.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(line.label(i)[0] == static_cast<int>(i) - 2);
  CHECK(line.momentum_squared(4) == doctest::Approx(16.0 * M_PI * M_PI).epsilon(1e-15));
  CHECK(line.zero_index() == 2);

  const ModeSet square = build_mode_set(2, 1);
  REQUIRE(square.size() == 9);
  // brute-force {-1,0,1}^2 in lexicographic order
  std::size_t i = 0;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      CHECK(square.label(i) == Label{a, b});
      ++i;
    }
  }
}

TEST_CASE("mode set is closed under negation with one zero mode") {
  for (int d = 1; d <= 3; ++d) {
    const ModeSet modes = build_mode_set(d, 2);
    int zeros = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const Label& n = modes.label(i);
      Label minus(n.size());
      for (std::size_t k = 0; k < n.size(); ++k) minus[k] = -n[k];
      const auto j = modes.find(minus);
      REQUIRE(j.has_value());
      CHECK(*j == modes.negate(i));
      if (std::all_of(n.begin(), n.end(), [](int c) { return c == 0; })) ++zeros;
    }
    CHECK(zeros == 1);
    CHECK(modes.label(modes.zero_index()) == Label(d, 0));
  }
}

TEST_CASE("mode arithmetic stays inside the cutoff") {
  const ModeSet modes = build_mode_set(1, 2);
  CHECK(modes.add(3, 3) == std::optional<std::size_t>(4));  // 1 + 1 = 2
  CHECK_FALSE(modes.add(4, 3).has_value());                 // 2 + 1 = 3 is outside
  CHECK(modes.subtract(0, 4) == std::optional<std::size_t>());
  CHECK(modes.subtract(3, 3) == std::optional<std::size_t>(2));
  const std::vector<int> out_of_range = {3};
  CHECK_FALSE(modes.find(out_of_range).has_value());
}

TEST_CASE("mode set rejects bad parameters") {
  CHECK_THROWS_AS(build_mode_set(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_mode_set(1, -1), std::invalid_argument);
}

TEST_CASE("potential validation") {
  const ModeSet modes = build_mode_set(1, 1);
  CHECK_THROWS_AS(Potential(modes, {1.0, 0.0, 2.0}), std::invalid_argument);   // not even
  CHECK_THROWS_AS(Potential(modes, {-1.0, 0.0, -1.0}), std::invalid_argument); // negative
  CHECK_THROWS_AS(Potential(modes, {1.0, 1.0}), std::invalid_argument);        // wrong size
  CHECK_THROWS_AS(Potential(modes, {NAN, 0.0, NAN}), std::invalid_argument);

  const Potential p = Potential::from_pairs(modes, {{{1}, 2.0}, {{0}, 0.5}});
  CHECK(p[0] == 2.0);
  CHECK(p[2] == 2.0);
  CHECK(p.zero_mode() == 0.5);
  CHECK(p.l1_norm() == 4.5);
  CHECK_THROWS_AS(Potential::from_pairs(modes, {{{1}, 2.0}, {{-1}, 3.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Potential::from_pairs(modes, {{{2}, 1.0}}), std::invalid_argument);
  CHECK(Potential::zero(modes).is_zero());
  CHECK(Potential::uniform(modes, 3.0).l1_norm() == 9.0);
}

TEST_CASE("evaluate_w examples") {
  const ModeSet modes = build_mode_set(1, 1);
  const std::vector<double> origin = {0.0};
  const std::vector<double> quarter = {0.25};
  CHECK(evaluate_w(Potential::zero(modes), modes, quarter) == 0.0);
  const Potential constant = Potential::from_pairs(modes, {{{0}, 1.0}});
  CHECK(evaluate_w(constant, modes, quarter) == doctest::Approx(1.0).epsilon(1e-15));
  const Potential three = Potential::uniform(modes, 1.0);
  CHECK(evaluate_w(three, modes, origin) == doctest::Approx(3.0).epsilon(1e-15));
  // 1 + 2 cos(pi/2) = 1
  CHECK(std::abs(evaluate_w(three, modes, quarter) - 1.0) < 1e-14);
}

TEST_CASE("w is even and w(0) equals the l1 norm") {
  const ModeSet modes = build_mode_set(2, 2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> coeff(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::size_t j = modes.negate(i);
    if (j < i) {
      coeff[i] = coeff[j];
    } else {
      coeff[i] = unit(rng);
    }
  }
  const Potential w(modes, coeff);
  const std::vector<double> origin = {0.0, 0.0};
  CHECK(std::abs(evaluate_w(w, modes, origin) - w.l1_norm()) < 1e-12);
  for (int s = 0; s < 100; ++s) {
    const std::vector<double> x = {unit(rng), unit(rng)};
    const std::vector<double> minus = {-x[0], -x[1]};
    CHECK(std::abs(evaluate_w(w, modes, x) - evaluate_w(w, modes, minus)) <= 1e-12);
  }
}

TEST_CASE("model config invariants") {
  ModelConfig config;
  config.modes = build_mode_set(1, 1);
  config.potential = Potential::uniform(config.modes, 1.0);
  config.particles = 2;
  CHECK_NOTHROW(config.validate());
  config.particles = 1;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.particles = 3;
  config.excitation_cutoff = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.excitation_cutoff = 2;
  config.expm_tol = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.expm_tol = 1e-12;
  config.potential = Potential::uniform(build_mode_set(1, 2), 1.0);
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
