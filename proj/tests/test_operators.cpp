#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "mfbog/experiments.h"
#include "mfbog/operators.h"
#include "oracles.h"

using namespace mfbog;

namespace {

ModelConfig make_config(int n_max, double w, int particles, int cutoff) {
  ModelConfig c;
  c.modes = build_mode_set(1, n_max);
  c.potential = Potential::uniform(c.modes, w);
  c.particles = particles;
  c.excitation_cutoff = cutoff;
  return c;
}

double lowest(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

// Every nonzero entry connects states of equal total momentum.
bool conserves_momentum(const SparseOperator& op) {
  const SectorBasis& b = op.basis();
  for (Eigen::Index k = 0; k < op.matrix().outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.matrix(), k); it; ++it) {
      if (b.total_momentum(b.state(static_cast<std::size_t>(it.row()))) !=
          b.total_momentum(b.state(static_cast<std::size_t>(it.col())))) {
        return false;
      }
    }
  }
  return true;
}

std::vector<Eigen::Index> block(const SectorBasis& b, int bound) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.excited_count(i) <= bound) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace

TEST_CASE("two-state Hamiltonian") {
  const ModelConfig c = make_config(1, 1.0, 2, 2);
  const BasisPtr basis = enumerate_canonical(c.modes, 2);
  const Eigen::MatrixXd h = build_HN(c, basis).dense();
  const double a = 8.0 * M_PI * M_PI;
  Eigen::Matrix2d expected;
  expected << 1.0, std::sqrt(2.0), std::sqrt(2.0), a + 1.0;
  CHECK((h - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(lowest(h) - oracle::frozen::tiny_energy) <= 1e-12);
}

TEST_CASE("H_N agrees with the first-quantized oracle") {
  struct Case {
    int n_max;
    int particles;
    std::map<int, double> w;
  };
  const std::vector<Case> cases = {
      {1, 2, {{0, 1.0}, {1, 1.0}, {-1, 1.0}}},
      {1, 4, {{0, 0.3}, {1, 2.0}, {-1, 2.0}}},
      {2, 3, {{0, 1.0}, {1, 0.5}, {-1, 0.5}, {2, 1.5}, {-2, 1.5}}},
      {2, 4, {{1, 0.7}, {-1, 0.7}, {2, 0.2}, {-2, 0.2}}},
  };
  for (const Case& k : cases) {
    ModelConfig c;
    c.modes = build_mode_set(1, k.n_max);
    std::vector<std::pair<Label, double>> pairs;
    for (const auto& [n, v] : k.w) if (n >= 0) pairs.push_back({{n}, v});
    c.potential = Potential::from_pairs(c.modes, pairs);
    c.particles = k.particles;
    const BasisPtr basis = enumerate_canonical(c.modes, k.particles);
    const auto occupations = oracle::balanced_occupations(k.n_max, k.particles);
    const Eigen::MatrixXd expected = oracle::first_quantized_hamiltonian(
        oracle::Lattice1d{k.n_max, k.w}, k.particles, occupations);
    const Eigen::MatrixXd got = build_HN(c, basis).dense();
    REQUIRE(got.rows() == expected.rows());
    CHECK((got - expected).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("H_N structural properties") {
  const ModelConfig free = [] {
    ModelConfig c = make_config(2, 0.0, 5, 5);
    c.potential = Potential::zero(c.modes);
    return c;
  }();
  const BasisPtr basis = enumerate_canonical(free.modes, 5);
  const SparseOperator h0 = build_HN(free, basis);
  CHECK((h0.dense() - Eigen::MatrixXd(h0.dense().diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lowest(h0.dense()) == 0.0);

  const ModelConfig c = make_config(2, 2.0, 5, 5);
  const SparseOperator h = build_HN(c, enumerate_canonical(c.modes, 5, false));
  CHECK(h.symmetry_defect() <= 1e-12);
  CHECK(conserves_momentum(h));

  ModelConfig bad = c;
  bad.particles = 1;
  CHECK_THROWS_AS(build_HN(bad, enumerate_canonical(c.modes, 1)), std::invalid_argument);
  CHECK_THROWS_AS(build_HN(c, enumerate_excitation(c.modes, 2)), std::invalid_argument);
}

TEST_CASE("H_Bog") {
  ModelConfig free = make_config(1, 0.0, 4, 6);
  free.potential = Potential::zero(free.modes);
  const BasisPtr basis = enumerate_excitation(free.modes, 6);
  const Eigen::MatrixXd h0 = build_HBog(free, basis).dense();
  CHECK((h0 - Eigen::MatrixXd(h0.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);

  const ModelConfig c = make_config(1, 1.0, 4, 4);
  CHECK(vacuum_expectation(build_HBog(c, basis)) == 0.0);
  const double e_bog = coefficients(c.potential, c.modes).energy();
  double previous = std::numeric_limits<double>::infinity();
  for (int m : {2, 4, 6, 8}) {
    const double e = lowest(build_HBog(c, enumerate_excitation(c.modes, m)).dense());
    CHECK(e >= e_bog - 1e-12);
    CHECK(e <= previous);
    previous = e;
  }
  CHECK(previous - e_bog < 1e-6);
}

TEST_CASE("G_N") {
  ModelConfig free = make_config(2, 0.0, 6, 6);
  free.potential = Potential::zero(free.modes);
  const BasisPtr basis = enumerate_excitation(free.modes, 6);
  const Eigen::MatrixXd g0 = build_GN(free, basis).dense();
  const Eigen::MatrixXd kinetic = build_HBog(free, basis).dense();
  CHECK((g0 - kinetic).cwiseAbs().maxCoeff() == 0.0);

  const ModelConfig c = make_config(2, 3.0, 6, 6);
  const SparseOperator g = build_GN(c, basis);
  CHECK(g.symmetry_defect() <= 1e-12);
  CHECK(conserves_momentum(g));
  ModelConfig bad = c;
  bad.particles = 1;
  CHECK_THROWS_AS(build_GN(bad, basis), std::invalid_argument);
}

TEST_CASE("G_N approximates the excitation Hamiltonian with decaying error") {
  const ModelConfig base = make_config(1, 1.0, 4, 6);
  std::vector<std::pair<double, double>> points;
  for (int n = 4; n <= 14; n += 2) {
    ModelConfig c = base;
    c.particles = n;
    points.emplace_back(n, excitation_approximation_residual(c, 4).weighted);
  }
  const PowerLawFit fit = fit_power_law(points);
  CHECK(fit.exponent <= -1.0);
  for (std::size_t i = 1; i < points.size(); ++i) CHECK(points[i].second < points[i - 1].second);
}

TEST_CASE("C_N") {
  const ModelConfig c = make_config(2, 5.0, 8, 6);
  const BasisPtr basis = enumerate_excitation(c.modes, 6);
  const BogoliubovData bog = coefficients(c.potential, c.modes);
  const SparseOperator cn = build_CN(c, bog, basis);
  CHECK(vacuum_expectation(cn) == 0.0);
  CHECK(cn.symmetry_defect() <= 1e-12);

  ModelConfig free = c;
  free.potential = Potential::zero(c.modes);
  CHECK(build_CN(free, coefficients(free.potential, free.modes), basis).matrix().nonZeros() == 0);

  // vacuum -> a*_2 a*_{-1} a*_{-1}|0> (labels in units of 2 pi) collects every
  // (p, q) whose triple (p+q, -p, -q) is a permutation of (2, -1, -1); the
  // doubled -1 mode contributes sqrt(2).
  Occupation target(4, 0);
  target[*basis->mode_slot(4)] = 1;
  target[*basis->mode_slot(1)] = 2;
  const auto row = basis->find(target);
  REQUIRE(row.has_value());
  double expected = 0.0;
  int terms = 0;
  for (int p = -2; p <= 2; ++p) {
    for (int q = -2; q <= 2; ++q) {
      if (p == 0 || q == 0 || p + q == 0 || std::abs(p + q) > 2) continue;
      std::vector<int> triple = {p + q, -p, -q};
      std::sort(triple.begin(), triple.end());
      if (triple != std::vector<int>{-1, -1, 2}) continue;
      expected += cubic_coefficient(bog, c.potential, c.modes, p + 2, q + 2);
      ++terms;
    }
  }
  CHECK(terms == 3);
  expected *= std::sqrt(2.0) / std::sqrt(8.0);
  CHECK(std::abs(cn.matrix().coeff(static_cast<Eigen::Index>(*row), 0) - expected) <= 1e-15);
}

TEST_CASE("C_N is the cubic part of the Bogoliubov-rotated cubic term") {
  // <3-particle| U_B K U_B^* |0> picks exactly the a*a*a* coefficient of the
  // rotated cubic term K of G_N; this fixes the sign convention of C_N.
  const ModelConfig c = make_config(2, 5.0, 8, 10);
  const BasisPtr basis = enumerate_excitation(c.modes, 10);
  const BogoliubovData bog = coefficients(c.potential, c.modes);
  const ModeSet& modes = c.modes;
  OperatorRecipe k(modes, "K");
  for (std::size_t l = 0; l < modes.size(); ++l) {
    if (l == modes.zero_index()) continue;
    for (std::size_t p = 0; p < modes.size(); ++p) {
      if (p == modes.zero_index()) continue;
      const auto pl = modes.add(p, l);
      if (!pl || *pl == modes.zero_index()) continue;
      k.add_with_adjoint(c.potential[l] / std::sqrt(8.0),
                         {create(*pl), create(modes.negate(l)), annihilate(p)});
    }
  }
  const Unitary u_b(build_quadratic_generator(bog, basis).matrix(), 1e-12);
  const Eigen::MatrixXd rotated = conjugate(k.assemble(basis, Symmetry::hermitian), u_b);
  const Eigen::MatrixXd cn = build_CN(c, bog, basis).dense();
  int checked = 0;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    if (basis->excited_count(i) != 3) continue;
    const auto r = static_cast<Eigen::Index>(i);
    CHECK(std::abs(rotated(r, 0) - cn(r, 0)) <= 1e-9);
    if (std::abs(cn(r, 0)) > 1e-6) ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("quadratic generator") {
  const ModelConfig c = make_config(2, 2.0, 6, 6);
  const BasisPtr basis = enumerate_excitation(c.modes, 6);
  const BogoliubovData bog = coefficients(c.potential, c.modes);
  const SparseOperator b = build_quadratic_generator(bog, basis);
  CHECK(b.symmetry_defect() <= 1e-12);
  // B|0> = sum over pairs {p, -p} of 2 beta_p |1_p 1_{-p}>
  for (std::size_t p : {std::size_t{3}, std::size_t{4}}) {
    Occupation pair(4, 0);
    pair[*basis->mode_slot(p)] = 1;
    pair[*basis->mode_slot(c.modes.negate(p))] = 1;
    const auto row = basis->find(pair);
    REQUIRE(row.has_value());
    CHECK(std::abs(b.matrix().coeff(static_cast<Eigen::Index>(*row), 0) - 2.0 * bog[p].beta) <= 1e-15);
  }
  const BogoliubovData free = coefficients(Potential::zero(c.modes), c.modes);
  CHECK(build_quadratic_generator(free, basis).matrix().nonZeros() == 0);
}

TEST_CASE("cubic generator") {
  const ModelConfig c = make_config(2, 5.0, 10, 10);
  const BasisPtr basis = enumerate_excitation(c.modes, 10);
  const BogoliubovData bog = coefficients(c.potential, c.modes);
  const SparseOperator s = build_cubic_generator(c, bog, basis);
  CHECK(s.symmetry_defect() <= 1e-12);

  // M <= N: the particle cutoff is inert
  const Eigen::MatrixXd without = build_cubic_generator(c, bog, basis, false).dense();
  CHECK((s.dense() - without).cwiseAbs().maxCoeff() == 0.0);

  // M > N: the indicator removes transitions out of N_+ > N
  ModelConfig small_n = c;
  small_n.particles = 4;
  const Eigen::MatrixXd cut = build_cubic_generator(small_n, bog, basis).dense();
  const Eigen::MatrixXd uncut = build_cubic_generator(small_n, bog, basis, false).dense();
  CHECK((cut - uncut).cwiseAbs().maxCoeff() > 0.0);
  CHECK((cut + cut.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  ModelConfig free = c;
  free.potential = Potential::zero(c.modes);
  CHECK(build_cubic_generator(free, coefficients(free.potential, free.modes), basis)
            .matrix()
            .nonZeros() == 0);
}

TEST_CASE("cubic generator removes C_N") {
  for (int n : {6, 10, 14}) {
    ModelConfig c = make_config(2, 5.0, n, 10);
    CHECK(cubic_relation_defect(c) <= 1e-10);
  }
  // also away from the inert block the relation holds wherever S is unclipped
  const ModelConfig c = make_config(2, 5.0, 6, 10);
  const BasisPtr basis = enumerate_excitation(c.modes, 10);
  const BogoliubovData bog = coefficients(c.potential, c.modes);
  const Eigen::MatrixXd defect = commutator(build_cubic_generator(c, bog, basis),
                                            build_dispersion(bog, basis)) +
                                 build_CN(c, bog, basis).dense();
  const auto low = block(*basis, 3);
  CHECK(defect(low, low).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(defect.cwiseAbs().maxCoeff() > 1e-6);  // clipped above N_+ = N
}

TEST_CASE("Bogoliubov rotation mixes a_p and a*_{-p}") {
  // U_B a_p U_B^* = sigma_p a_p - gamma_p a*_{-p}, checked on the N_+ <= 2 block
  ModelConfig c = make_config(1, 5.0, 4, 4);
  const BogoliubovData bog = coefficients(c.potential, c.modes);
  double previous = std::numeric_limits<double>::infinity();
  for (int m : {6, 10, 14}) {
    const BasisPtr basis = enumerate_excitation(c.modes, m, false);
    const Unitary u(build_quadratic_generator(bog, basis).matrix(), 1e-12);
    const auto n = static_cast<Eigen::Index>(basis->size());
    auto assemble = [n](const std::vector<Eigen::Triplet<double>>& t) {
      Eigen::SparseMatrix<double> m(n, n);
      m.setFromTriplets(t.begin(), t.end());
      return m;
    };
    const SparseOperator ap(basis, assemble(matrix_element_monomial(*basis, {annihilate(2)}, 1.0)),
                            Symmetry::general);
    auto mix = matrix_element_monomial(*basis, {annihilate(2)}, bog[2].sigma);
    const auto dagger = matrix_element_monomial(*basis, {create(0)}, -bog[2].gamma);
    mix.insert(mix.end(), dagger.begin(), dagger.end());
    const Eigen::MatrixXd rotated = conjugate(ap, u);
    const Eigen::MatrixXd expected(assemble(mix));
    const auto low = block(*basis, 2);
    const double err = (rotated - expected)(low, low).cwiseAbs().maxCoeff();
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-8);
}

TEST_CASE("conjugation and vacuum expectations") {
  const ModelConfig c = make_config(1, 1.0, 4, 8);
  const BasisPtr basis = enumerate_excitation(c.modes, 8);
  const SparseOperator h = build_HBog(c, basis);
  const Eigen::MatrixXd same = conjugate(h, Unitary::identity(h.dimension()));
  CHECK((same - h.dense()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(vacuum_expectation(build_number_operator(basis)) == 0.0);

  const BogoliubovData bog = coefficients(c.potential, c.modes);
  const Unitary u(build_quadratic_generator(bog, basis).matrix(), 1e-12);
  const Eigen::MatrixXd rotated = conjugate(h, u);
  CHECK((rotated - rotated.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(h.dense(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(0.5 * (rotated + rotated.transpose()),
                                                   Eigen::EigenvaluesOnly);
  CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(std::abs(vacuum_expectation(rotated, *basis) - bog.energy()) <= 1e-8);

  CHECK_THROWS_AS(conjugate(Eigen::MatrixXd::Zero(2, 2), u), std::invalid_argument);
}

TEST_CASE("Onsager inequality") {
  const ModeSet modes = build_mode_set(1, 1);
  // constant potential: slack is N w(0)/(N-1) for every sample
  const Potential constant = Potential::from_pairs(modes, {{{0}, 2.0}});
  const OnsagerReport flat = onsager_check(constant, modes, 5, 50, 1);
  CHECK(std::abs(flat.min_slack - 5.0 * 2.0 / 4.0) <= 1e-12);
  CHECK(flat.passed);

  // all particles at one point: N w(0)/2 - N w_hat(0)/2 + N w(0)/(N-1) >= 0
  const Potential w = Potential::uniform(modes, 1.0);
  const double n = 5, w_origin = 3.0, w_hat0 = 1.0;
  const double coincident = (n * (n - 1) / 2 * w_origin) / (n - 1) -
                            (n * w_hat0 / 2 - n * w_origin / (n - 1));
  CHECK(coincident >= 0.0);

  const OnsagerReport sweep = onsager_check(w, modes, 5, 10000, 42);
  CHECK(sweep.samples == 10000);
  CHECK(sweep.min_slack >= -1e-9);
  CHECK(sweep.passed);
  CHECK_THROWS_AS(onsager_check(w, modes, 5, 0, 1), std::invalid_argument);
}

TEST_CASE("recipes reject momentum-violating monomials") {
  const ModeSet modes = build_mode_set(1, 1);
  OperatorRecipe r(modes, "bad");
  CHECK_THROWS_AS(r.add(1.0, {create(0)}), std::logic_error);
  CHECK_THROWS_AS(r.add(1.0, {create(0), create(0)}), std::logic_error);
  CHECK_NOTHROW(r.add(1.0, {create(0), create(2)}));
  CHECK_THROWS_AS(r.assemble(enumerate_excitation(modes, 2), Symmetry::hermitian),
                  std::logic_error);  // a*a* alone is not hermitian
}
