#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "symmwell/model.hpp"
#include "symmwell/symmetriser.hpp"

using namespace symmwell;
using namespace symmwell::symmetriser;
using model::WellParameters;

namespace {

const double kR3 = std::sqrt(3.0);

ComplexMatrix ham(const WellParameters& p) { return model::build_hamiltonian(p); }

linalg::Spectrum bispec(const WellParameters& p,
                        linalg::BiorthogonalGauge g = linalg::BiorthogonalGauge::unit_right) {
  return linalg::biorthonormalize(linalg::eig(ham(p)), g);
}

WellParameters lunt() { return WellParameters({0, 0}, {2, -0.5}); }

// Random eps triple with gaps >= 0.05 and 0 < d12 d23 <= J^2.
std::array<double, 3> random_admissible(std::mt19937_64& rng, double j = 1.0) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (;;) {
    const std::array<double, 3> e{u(rng), u(rng), u(rng)};
    const double d12 = e[0] - e[1], d23 = e[1] - e[2], d13 = e[0] - e[2];
    if (std::abs(d12) < 0.05 || std::abs(d23) < 0.05 || std::abs(d13) < 0.05) continue;
    const double prod = d12 * d23;
    if (prod > 0.0 && prod <= j * j) return e;
  }
}

double hermiticity(const ComplexMatrix& s) { return (s - s.adjoint()).norm(); }

}  // namespace

TEST_CASE("spectral construction: Hermitian H gives the identity") {
  ComplexMatrix h(3, 3);
  h << 1.0, Complex(0, 0.5), 0.2, Complex(0, -0.5), -1.0, 0.1, 0.2, 0.1, 0.3;
  const auto s = linalg::biorthonormalize(linalg::eig(h));
  const auto sl = build_spectral_symmetriser(s, Side::left);
  CHECK((sl.matrix - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
  CHECK(sl.rank == 3);
  CHECK(sl.is_invertible());
}

TEST_CASE("spectral construction: PT dimer below the EP") {
  const auto p = WellParameters({0, 0}, {0.5, -0.5});
  const auto s = bispec(p);
  const auto sl = build_spectral_symmetriser(s, Side::left);
  const auto sr = build_spectral_symmetriser(s, Side::right);
  CHECK(sl.rank == 2);
  CHECK(sl.residual <= 1e-10);
  CHECK(sr.residual <= 1e-10);
  CHECK(quasi_commutator_residual(sl.matrix, sr.matrix, ham(p)) <= 1e-9);
  CHECK(semi_inverse_residual(sl.matrix, sr.matrix) <= 1e-9);
}

TEST_CASE("spectral construction: Lunt trap is rank one") {
  const auto s = bispec(lunt());
  REQUIRE(s.classification.isolated_indices.size() == 1);
  const auto sl = build_spectral_symmetriser(s, Side::left);
  CHECK(sl.rank == 1);
  REQUIRE(sl.kernel.size() == 1);
  ComplexVector v(2);
  v << Complex(0, -2), 1.0;
  CHECK((sl.matrix * v).norm() <= 1e-10 * sl.matrix.norm());

  ComplexMatrix hand(2, 2);
  hand << -2.0 / 3, Complex(0, -4.0 / 3), Complex(0, 4.0 / 3), -8.0 / 3;
  // Sigma is a real multiple of the hand-derived matrix.
  const Complex c = sl.matrix(1, 1) / hand(1, 1);
  CHECK(std::abs(c.imag()) < 1e-12);
  CHECK((sl.matrix - c * hand).norm() <= 1e-10 * sl.matrix.norm());

  const ComplexMatrix h = ham(lunt());
  CHECK((sl.matrix * h).norm() <= 1e-10 * sl.matrix.norm());
  CHECK((h.adjoint() * sl.matrix).norm() <= 1e-10 * sl.matrix.norm());

  const auto sr = build_spectral_symmetriser(s, Side::right);
  CHECK(semi_inverse_residual(sl.matrix, sr.matrix) <= 1e-9);
}

TEST_CASE("spectral construction refuses an EP and non-biorthonormal input") {
  const auto at_ep = linalg::eig(ham(WellParameters({0, 0}, {1, -1})));
  CHECK_THROWS_AS(build_spectral_symmetriser(at_ep, Side::left), std::invalid_argument);
  auto flagged = at_ep;
  flagged.normalization = linalg::Normalization::biorthogonal;
  CHECK_THROWS_AS(build_spectral_symmetriser(flagged, Side::left), ExceptionalPointError);

  const auto s = bispec(WellParameters({0, 0}, {0.5, -0.5}));
  SpectralCoefficients wrong;
  wrong.real_terms = {1.0};
  CHECK_THROWS_AS(build_spectral_symmetriser(s, Side::left, wrong), std::invalid_argument);
  SpectralCoefficients ok;
  ok.real_terms = {2.0, 0.5};
  const auto sl = build_spectral_symmetriser(s, Side::left, ok);
  CHECK(sl.residual <= 1e-10);
  CHECK(sl.coefficients.size() == 2);
}

TEST_CASE("symmetrisation_residual examples") {
  ComplexMatrix herm(2, 2);
  herm << 1.0, Complex(0, 1), Complex(0, -1), -0.5;
  CHECK(symmetrisation_residual(ComplexMatrix::Identity(2, 2), herm, Side::left) < 1e-15);

  const ComplexMatrix pmat = model::parity(2).cast<Complex>();
  for (double g : {0.5, 1.0, 1.7})
    CHECK(symmetrisation_residual(pmat, ham(WellParameters({0, 0}, {g, -g})), Side::left) < 1e-15);

  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 0) = Complex(0, 1);
  // ||H - H^H|| = 2, ||I|| = sqrt 2, ||H|| = 1.
  CHECK(symmetrisation_residual(ComplexMatrix::Identity(2, 2), h, Side::left) ==
        doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("semi-inverse and quasi-commutator trivial cases") {
  const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
  CHECK(semi_inverse_residual(id, id) < 1e-15);
  const ComplexMatrix h = ham(WellParameters({0.1, 0.4, -0.3}, {0.2, -0.7, 0.5}));
  CHECK(quasi_commutator_residual(id, id, h) < 1e-15);
  CHECK(semi_inverse_residual(id, ComplexMatrix::Zero(3, 3)) == 1.0);
}

TEST_CASE("full-rank three-well sample: Sigma_R is proportional to Sigma_L^-1") {
  const auto sol = solve_3mode_gammas({0.8, 0.0, -0.8}, 1.0);
  REQUIRE(sol.triples.size() == 2);
  const auto& g = sol.triples[0];
  const WellParameters p({0.8, 0.0, -0.8}, {g[0], g[1], g[2]});
  const auto s = bispec(p);
  const auto sl = build_spectral_symmetriser(s, Side::left);
  const auto sr = build_spectral_symmetriser(s, Side::right);
  CHECK(sl.rank == 3);
  CHECK(semi_inverse_residual(sl.matrix, sr.matrix) <= 1e-9);
  CHECK(quasi_commutator_residual(sl.matrix, sr.matrix, ham(p)) <= 1e-9);
  const ComplexMatrix inv = sl.matrix.inverse();
  const Complex c = sr.matrix(0, 0) / inv(0, 0);
  CHECK((sr.matrix - c * inv).norm() <= 1e-9 * sr.matrix.norm());
}

TEST_CASE("antilinear T matrices") {
  SUBCASE("real symmetric H gives M = I") {
    const auto s = bispec(WellParameters({0.3, -0.1, 0.2}, {0, 0, 0}));
    CHECK((build_antilinear_t(s, Side::left) - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
  }
  SUBCASE("complex-symmetric gauge gives M_L = I") {
    const auto s = bispec(WellParameters({0.3, -0.1, 0.2}, {0.4, -0.3, 0.1}),
                          linalg::BiorthogonalGauge::complex_symmetric);
    CHECK((build_antilinear_t(s, Side::left) - ComplexMatrix::Identity(3, 3)).norm() < 1e-10);
    CHECK((build_antilinear_t(s, Side::right) - ComplexMatrix::Identity(3, 3)).norm() < 1e-10);
  }
  SUBCASE("PT dimer residual") {
    const auto p = WellParameters({0, 0}, {0.5, -0.5});
    const auto s = bispec(p);
    CHECK(antilinear_residual(build_antilinear_t(s, Side::left), ham(p), Side::left) <= 1e-9);
    CHECK(antilinear_residual(build_antilinear_t(s, Side::right), ham(p), Side::right) <= 1e-9);
  }
}

TEST_CASE("induced antilinear symmetry") {
  SUBCASE("real H, Sigma = I, M = I") {
    const ComplexMatrix h = ham(WellParameters({0.3, -0.1}, {0, 0}));
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const auto a = induced_antilinear_symmetry(id, id, h);
    CHECK((a.matrix - id).norm() < 1e-15);
    CHECK(a.commutes);
  }
  SUBCASE("PT dimer with Sigma = P reproduces PT") {
    const auto p = WellParameters({0, 0}, {0.5, -0.5});
    const auto s = bispec(p, linalg::BiorthogonalGauge::complex_symmetric);
    const ComplexMatrix pmat = model::parity(2).cast<Complex>();
    const auto a = induced_antilinear_symmetry(pmat, build_antilinear_t(s, Side::left), ham(p));
    CHECK(a.commutes);
    CHECK((a.matrix - pmat).norm() < 1e-10);
  }
  SUBCASE("Lunt trap is reported, not asserted") {
    const auto s = bispec(lunt());
    const auto sl = build_spectral_symmetriser(s, Side::left);
    const auto a = induced_antilinear_symmetry(sl.matrix, build_antilinear_t(s, Side::left),
                                               ham(lunt()));
    CHECK(std::isfinite(a.residual));
  }
  SUBCASE("singular M_L is refused") {
    const ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    CHECK_THROWS_AS(induced_antilinear_symmetry(z, z, z), NumericalError);
  }
}

TEST_CASE("Pauli solver examples") {
  SUBCASE("PT dimer: two-parameter family containing P") {
    const auto p = WellParameters({0, 0}, {0.5, -0.5});
    const auto sol = solve_pauli_2mode(p);
    CHECK(sol.family_dimension == 2);
    Eigen::Vector4d target(0, 1, 0, 0);
    Eigen::Vector4d proj = Eigen::Vector4d::Zero();
    for (const auto& b : sol.basis) {
      const Eigen::Vector4d v(b[0], b[1], b[2], b[3]);
      proj += v.dot(target) * v;
      CHECK(std::abs(v(2) + 0.5 * v(0)) < 1e-12);  // s2 = -(gamma/J) s0
      CHECK(std::abs(v(3)) < 1e-12);
      CHECK(analyse_symmetriser(pauli_matrix(b), ham(p), Side::left).residual <= 1e-10);
    }
    CHECK((proj - target).norm() < 1e-12);
  }
  SUBCASE("semi-symmetrised dimer: one degree of freedom, singular Sigma") {
    const double e = 3.0 * kR3 / 8.0;
    const auto p = WellParameters({e, -e}, {1, -0.25});
    const auto sol = solve_pauli_2mode(p);
    CHECK(sol.family_dimension == 1);
    CHECK(std::abs(sol.determinant_value) < 1e-12);
    const auto a = analyse_symmetriser(pauli_matrix(sol.basis[0]), ham(p), Side::left);
    CHECK(a.rank == 1);
    CHECK(std::abs(a.matrix.determinant()) < 1e-12);
    CHECK(a.residual <= 1e-10);
  }
  SUBCASE("no solution") {
    const auto p = WellParameters({0, 0.3}, {0.5, 0.5});
    const auto sol = solve_pauli_2mode(p);
    CHECK(sol.family_dimension == 0);
    CHECK(sol.determinant_value == doctest::Approx(5.09).epsilon(1e-12));
    CHECK(std::abs(pauli_determinant(p) - sol.coefficient_matrix.determinant()) < 1e-12);
  }
  CHECK_THROWS_AS(solve_pauli_2mode(WellParameters({0, 0, 0}, {0, 0, 0})), std::invalid_argument);
}

TEST_CASE("determinant closed form agrees with the coefficient matrix") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = WellParameters({u(rng), u(rng)}, {u(rng), u(rng)}, 0.2 + std::abs(u(rng)));
    const double d = pauli_coefficient_matrix(p).determinant();
    CHECK(std::abs(pauli_determinant(p) - d) <= 1e-10 * (1.0 + std::abs(d)));
  }
}

TEST_CASE("delta_epsilon_2mode examples") {
  const auto a = delta_epsilon_2mode(1.0, -0.25, 1.0);
  REQUIRE(a);
  CHECK(std::abs(std::abs(a->plus) - 3.0 * kR3 / 4.0) < 1e-14);
  CHECK(a->plus == doctest::Approx(-a->minus));
  CHECK(a->non_negative() >= 0.0);
  CHECK_FALSE(a->boundary);

  const auto b = delta_epsilon_2mode(0.7, -0.7, 1.0);
  REQUIRE(b);
  CHECK(b->plus == 0.0);
  CHECK(b->minus == 0.0);

  CHECK_FALSE(delta_epsilon_2mode(0.5, 0.5, 1.0));
  CHECK_FALSE(delta_epsilon_2mode(0.0, -0.5, 1.0));
  CHECK_FALSE(delta_epsilon_2mode(3.0, -0.5, 1.0));

  const auto c = delta_epsilon_2mode(2.0, -0.5, 1.0);
  REQUIRE(c);
  CHECK(c->boundary);
  CHECK(c->plus == 0.0);
}

TEST_CASE("eigen2_closed examples and oracle agreement") {
  auto [a, b] = eigen2_closed(WellParameters({0, 0}, {0.5, -0.5}));
  CHECK(std::abs(a - std::sqrt(0.75)) < 1e-15);
  CHECK(std::abs(b + std::sqrt(0.75)) < 1e-15);

  const double e = 3.0 * kR3 / 8.0;
  std::tie(a, b) = eigen2_closed(WellParameters({-e, e}, {1, -0.25}));
  CHECK(std::abs(a - 5.0 * kR3 / 8.0) < 1e-12);
  CHECK(std::abs(b - Complex(-5.0 * kR3 / 8.0, 0.75)) < 1e-12);

  std::tie(a, b) = eigen2_closed(WellParameters({0, 0}, {0, 0}));
  CHECK(std::abs(a - 1.0) < 1e-15);
  CHECK(std::abs(b + 1.0) < 1e-15);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> eps{u(rng), u(rng)}, gam{u(rng), u(rng)};
    const double j = 0.2 + std::abs(u(rng));
    const auto [p, m] = eigen2_closed(WellParameters(eps, gam, j));
    const auto ref = oracle::eigenvalues(oracle::tridiagonal(eps, gam, j));
    CHECK(oracle::match_distance({p, m}, ref) < 1e-9);
  }
}

TEST_CASE("solve_3mode_gammas examples") {
  const auto s = solve_3mode_gammas({0.5, 0.0, -0.5}, 1.0);
  REQUIRE(s.triples.size() == 2);
  CHECK(s.gamma0[0] == doctest::Approx(kR3).epsilon(1e-14));
  CHECK(s.gamma0[1] == doctest::Approx(-kR3).epsilon(1e-14));
  CHECK(std::abs(s.triples[0][0] + kR3 / 2) < 1e-14);
  CHECK(std::abs(s.triples[0][1] - kR3) < 1e-14);
  CHECK(std::abs(s.triples[0][2] + kR3 / 2) < 1e-14);
  for (int k = 0; k < 3; ++k) CHECK(s.triples[1][k] == -s.triples[0][k]);
  for (const auto& t : s.triples) {
    const auto c = three_mode_conditions({0.5, 0.0, -0.5}, t, 1.0);
    for (double x : c) CHECK(std::abs(x) < 1e-12);
  }

  CHECK(solve_3mode_gammas({0.0, 0.5, 0.0}, 1.0).pt_family);
  CHECK(solve_3mode_gammas({0.0, 0.5, 0.3}, 1.0).empty());
  CHECK(solve_3mode_gammas({1.5, 0.0, -1.5}, 1.0).empty());
  CHECK(solve_3mode_gammas({0.2, 0.2, 0.2}, 1.0).hermitian);
  CHECK(solve_3mode_gammas({0.2, 0.2, -0.5}, 1.0).empty());
}

TEST_CASE("charpoly_reality_residual examples") {
  ComplexMatrix herm(2, 2);
  herm << 1.0, Complex(0.2, 0.3), Complex(0.2, -0.3), -0.4;
  CHECK(charpoly_reality_residual(herm) <= 1e-12);
  const ComplexMatrix cusp = ham(WellParameters({0.5, 0, -0.5}, {-kR3 / 2, kR3, -kR3 / 2}));
  CHECK(charpoly_reality_residual(cusp) <= 1e-10);
  const auto poly = linalg::char_poly(cusp);
  for (const auto& c : poly.coeffs) CHECK(std::abs(c) < 1e-12);
  for (double e : {0.0, 0.7, -1.3})
    CHECK(charpoly_reality_residual(ham(WellParameters({e, -e}, {1, -0.25}))) > 0.1);
}

TEST_CASE("symmetrised three-well samples have conjugation-closed spectra") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto eps = random_admissible(rng);
    const auto sol = solve_3mode_gammas(eps, 1.0);
    REQUIRE(sol.triples.size() == 2);
    for (const auto& g : sol.triples) {
      const ComplexMatrix h = ham(WellParameters({eps[0], eps[1], eps[2]}, {g[0], g[1], g[2]}));
      if (charpoly_reality_residual(h) > 1e-10) continue;
      ++checked;
      const auto v = linalg::eig(h).values();
      CHECK(linalg::classify_pairing(v, 1e-8).isolated_indices.empty());
    }
  }
  CHECK(checked == 2000);
}

TEST_CASE("constructed symmetrisers are sound") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int built = 0;
  for (int trial = 0; trial < 300; ++trial) {
    WellParameters p({0, 0}, {0, 0});
    if (trial % 3 == 0) {
      const auto eps = random_admissible(rng);
      const auto g = solve_3mode_gammas(eps, 1.0).triples[trial % 2];
      p = WellParameters({eps[0], eps[1], eps[2]}, {g[0], g[1], g[2]});
    } else if (trial % 3 == 1) {
      const double g = 2.0 * u(rng);
      const double e0 = 0.5 * u(rng);
      p = WellParameters({e0, e0}, {g, -g});
    } else {
      // Semi-symmetrised dimer: -J^2 < g1 g2 < 0, g1 + g2 != 0.
      const double g1 = 0.1 + std::abs(u(rng));
      const double g2 = -(0.05 + 0.9 * std::abs(u(rng))) / g1;
      if (std::abs(g1 + g2) < 1e-3) continue;
      const double d = delta_epsilon_2mode(g1, g2, 1.0)->non_negative();
      p = WellParameters({0.5 * d, -0.5 * d}, {g1, g2});
    }
    const auto raw = linalg::eig(ham(p));
    if (raw.min_self_orthogonality() < 1e-4) continue;
    const auto s = linalg::biorthonormalize(raw);
    for (Side side : {Side::left, Side::right}) {
      const auto sg = build_spectral_symmetriser(s, side);
      ++built;
      const double nrm = sg.matrix.norm();
      CHECK(hermiticity(sg.matrix) <= 1e-12 * nrm);
      CHECK(sg.residual <= 1e-9);
      CHECK(sg.rank + static_cast<int>(sg.kernel.size()) == p.wells());
      for (const auto& v : sg.kernel) CHECK((sg.matrix * v).norm() <= 1e-9 * nrm);

      // Kernel vectors are eigenvectors of isolated eigenvalues.
      CHECK(sg.kernel.size() == s.classification.isolated_indices.size());
      for (const auto& v : sg.kernel) {
        double best = INFINITY;
        for (int i : s.classification.isolated_indices) {
          const ComplexVector& e = side == Side::left ? s.pairs[i].right : s.pairs[i].left;
          const ComplexVector eu = e / e.norm();
          best = std::min(best, (v - eu * eu.dot(v)).norm());
        }
        CHECK(best <= 1e-8);
      }
    }
  }
  CHECK(built > 300);
}

TEST_CASE("semi-symmetrised dimers have rank one and exactly one real eigenvalue") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 300; ++trial) {
    const double g1 = 0.2 + 2.0 * u(rng);
    const double g2 = -u(rng) / g1;
    if (std::abs(g1 + g2) < 1e-3) continue;
    for (int sign : {+1, -1}) {
      const double d = sign * delta_epsilon_2mode(g1, g2, 1.0)->non_negative();
      const auto p = WellParameters({0.5 * d, -0.5 * d}, {g1, g2});
      const auto sol = solve_pauli_2mode(p);
      CHECK(sol.family_dimension == 1);
      const auto a = analyse_symmetriser(pauli_matrix(sol.basis[0]), ham(p), Side::left);
      CHECK(a.rank == 1);
      CHECK(a.residual <= 1e-9);
      const auto cls = linalg::eig(ham(p)).classification;
      CHECK(cls.real_indices.size() == 1);
      CHECK(cls.isolated_indices.size() == 1);
    }
  }
}

TEST_CASE("solve_3mode_gammas depends only on energy differences") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto e = random_admissible(rng);
    const double c = shift(rng);
    const auto a = solve_3mode_gammas(e, 1.0);
    const auto b = solve_3mode_gammas({e[0] + c, e[1] + c, e[2] + c}, 1.0);
    REQUIRE(a.triples.size() == b.triples.size());
    for (std::size_t t = 0; t < a.triples.size(); ++t) {
      for (int k = 0; k < 3; ++k)
        CHECK(std::abs(a.triples[t][k] - b.triples[t][k]) <=
              1e-9 * (1.0 + std::abs(a.triples[t][k])));
      CHECK(std::abs(a.gamma0[t] - b.gamma0[t]) <= 1e-9 * (1.0 + std::abs(a.gamma0[t])));
    }
  }
}

TEST_CASE("a left symmetriser of H is a right symmetriser of H^H") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    std::vector<double> e(n), g(n);
    for (int k = 0; k < n; ++k) {
      e[k] = u(rng);
      g[k] = u(rng);
    }
    const ComplexMatrix h = ham(WellParameters(e, g));
    ComplexMatrix sigma(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sigma(i, j) = Complex(u(rng), u(rng));
    sigma = (sigma + sigma.adjoint()).eval();
    CHECK(std::abs(symmetrisation_residual(sigma, h, Side::left) -
                   symmetrisation_residual(sigma, h.adjoint(), Side::right)) <= 1e-12);
  }
}
