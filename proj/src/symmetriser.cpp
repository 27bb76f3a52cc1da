#include "symmwell/symmetriser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace symmwell::symmetriser {

namespace {

void require_square_pair(const ComplexMatrix& a, const ComplexMatrix& b, const char* who) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    std::ostringstream os;
    os << who << ": dimension mismatch (" << a.rows() << "x" << a.cols() << " vs "
       << b.rows() << "x" << b.cols() << ")";
    throw std::invalid_argument(os.str());
  }
}

double ratio(double num, double den) { return den > 0.0 ? num / den : num; }

// Turns -0.0 into 0.0 so that emitted values do not depend on the sign of zero.
double unsigned_zero(double x) { return x == 0.0 ? 0.0 : x; }

}  // namespace

Symmetriser build_spectral_symmetriser(const linalg::Spectrum& s, Side side,
                                       const SpectralCoefficients& coefficients) {
  if (s.normalization != linalg::Normalization::biorthogonal)
    throw std::invalid_argument("build_spectral_symmetriser: spectrum is not biorthonormalized");
  if (s.degenerate)
    throw ExceptionalPointError(
        "build_spectral_symmetriser: spectrum is flagged as an exceptional point",
        s.min_self_orthogonality());

  const auto& cls = s.classification;
  if (!coefficients.real_terms.empty() &&
      coefficients.real_terms.size() != cls.real_indices.size())
    throw std::invalid_argument("build_spectral_symmetriser: need one coefficient per real eigenvalue");
  if (!coefficients.pair_plus.empty() &&
      coefficients.pair_plus.size() != cls.conjugate_pairs.size())
    throw std::invalid_argument("build_spectral_symmetriser: need one coefficient per conjugate pair");

  auto vec = [&](int i) -> const ComplexVector& {
    return side == Side::left ? s.pairs[i].left : s.pairs[i].right;
  };

  const Eigen::Index n = s.matrix.rows();
  ComplexMatrix sigma = ComplexMatrix::Zero(n, n);
  std::vector<Complex> used;

  for (std::size_t k = 0; k < cls.real_indices.size(); ++k) {
    const double p0 = coefficients.real_terms.empty() ? 1.0 : coefficients.real_terms[k];
    const ComplexVector& v = vec(cls.real_indices[k]);
    sigma += p0 * v * v.adjoint();
    used.emplace_back(p0);
  }
  for (std::size_t m = 0; m < cls.conjugate_pairs.size(); ++m) {
    auto [i, j] = cls.conjugate_pairs[m];
    if (s.pairs[i].value.imag() < s.pairs[j].value.imag()) std::swap(i, j);
    // i carries Im > 0, j carries Im < 0.
    const Complex pp = coefficients.pair_plus.empty() ? Complex{1.0} : coefficients.pair_plus[m];
    const ComplexVector& plus = vec(i);
    const ComplexVector& minus = vec(j);
    sigma += pp * minus * plus.adjoint() + std::conj(pp) * plus * minus.adjoint();
    used.push_back(pp);
    used.push_back(std::conj(pp));
  }

  Symmetriser out = analyse_symmetriser(sigma, s.matrix, side);
  out.coefficients = std::move(used);
  return out;
}

Symmetriser analyse_symmetriser(const ComplexMatrix& sigma, const ComplexMatrix& h, Side side) {
  require_square_pair(sigma, h, "analyse_symmetriser");
  Symmetriser out;
  out.side = side;
  out.matrix = 0.5 * (sigma + sigma.adjoint());

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(out.matrix);
  const double threshold = kKernelTolerance * out.matrix.norm();
  for (Eigen::Index k = 0; k < out.matrix.rows(); ++k) {
    if (std::abs(es.eigenvalues()(k)) > threshold)
      ++out.rank;
    else
      out.kernel.push_back(es.eigenvectors().col(k));
  }
  out.residual = symmetrisation_residual(out.matrix, h, side);
  return out;
}

double symmetrisation_residual(const ComplexMatrix& sigma, const ComplexMatrix& h, Side side) {
  require_square_pair(sigma, h, "symmetrisation_residual");
  const ComplexMatrix hd = h.adjoint();
  const ComplexMatrix defect =
      side == Side::left ? ComplexMatrix(sigma * h - hd * sigma) : ComplexMatrix(h * sigma - sigma * hd);
  return ratio(defect.norm(), sigma.norm() * h.norm());
}

double semi_inverse_residual(const ComplexMatrix& sigma_left, const ComplexMatrix& sigma_right) {
  require_square_pair(sigma_left, sigma_right, "semi_inverse_residual");
  const double ln = sigma_left.norm();
  if (ln == 0.0) return 0.0;

  const ComplexMatrix product = sigma_right * sigma_left;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(product, false);
  const auto& mu = es.eigenvalues();
  double largest = 0.0;
  for (Eigen::Index k = 0; k < mu.size(); ++k) largest = std::max(largest, std::abs(mu(k)));
  Complex sum{};
  int count = 0;
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    if (std::abs(mu(k)) > 1e-8 * largest) {
      sum += mu(k);
      ++count;
    }
  }
  if (count == 0) return 1.0;  // Sr Sl vanishes: Sl Sr Sl = 0 != Sl.
  const Complex scale = sum / static_cast<double>(count);
  const ComplexMatrix sr = sigma_right / scale;
  return (sigma_left * sr * sigma_left - sigma_left).norm() / ln;
}

double quasi_commutator_residual(const ComplexMatrix& sigma_left,
                                 const ComplexMatrix& sigma_right, const ComplexMatrix& h) {
  require_square_pair(sigma_left, sigma_right, "quasi_commutator_residual");
  require_square_pair(sigma_left, h, "quasi_commutator_residual");
  const ComplexMatrix q = sigma_right * sigma_left;
  return ratio((q * h - h * q).norm(), q.norm() * h.norm());
}

ComplexMatrix build_antilinear_t(const linalg::Spectrum& s, Side side) {
  if (s.degenerate)
    throw ExceptionalPointError("build_antilinear_t: spectrum is flagged as an exceptional point",
                                s.min_self_orthogonality());
  if (s.normalization != linalg::Normalization::biorthogonal)
    throw std::invalid_argument("build_antilinear_t: spectrum is not biorthonormalized");
  const Eigen::Index n = s.matrix.rows();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (const auto& p : s.pairs) {
    const ComplexVector& v = side == Side::left ? p.left : p.right;
    m += v * v.transpose();
  }
  return m;
}

double antilinear_residual(const ComplexMatrix& m, const ComplexMatrix& h, Side side) {
  require_square_pair(m, h, "antilinear_residual");
  const ComplexMatrix defect = side == Side::left
                                   ? ComplexMatrix(m * h.conjugate() - h.adjoint() * m)
                                   : ComplexMatrix(h * m - m * h.transpose());
  return ratio(defect.norm(), m.norm() * h.norm());
}

AntilinearSymmetry induced_antilinear_symmetry(const ComplexMatrix& sigma_left,
                                               const ComplexMatrix& t_left,
                                               const ComplexMatrix& h) {
  require_square_pair(sigma_left, t_left, "induced_antilinear_symmetry");
  require_square_pair(sigma_left, h, "induced_antilinear_symmetry");
  const double cond = linalg::condition_number(t_left);
  if (!(cond <= kAntilinearConditionLimit)) {
    std::ostringstream os;
    os << "induced_antilinear_symmetry: T_L matrix is ill-conditioned (cond = " << cond << ")";
    throw NumericalError(os.str(), cond);
  }
  AntilinearSymmetry out;
  out.matrix = t_left.partialPivLu().solve(sigma_left).conjugate();
  out.residual = ratio((out.matrix * h.conjugate() - h * out.matrix).norm(),
                       h.norm() * out.matrix.norm());
  out.commutes = out.residual <= kAntilinearTolerance;
  return out;
}

// ---------------------------------------------------------------------------

Eigen::Matrix4d pauli_coefficient_matrix(const model::WellParameters& p) {
  if (p.wells() != 2) throw std::invalid_argument("Pauli solver: requires exactly two wells");
  const double gp = p.gammas()[0] + p.gammas()[1];
  const double gm = p.gammas()[0] - p.gammas()[1];
  const double de = p.epsilons()[0] - p.epsilons()[1];
  const double j2 = 2.0 * p.coupling();
  Eigen::Matrix4d m;
  // clang-format off
  m << gp,  0.0, 0.0, gm,
       0.0, gp,  de,  0.0,
       0.0, -de, gp,  -j2,
       gm,  0.0, j2,  gp;
  // clang-format on
  return m;
}

double pauli_determinant(const model::WellParameters& p) {
  if (p.wells() != 2) throw std::invalid_argument("Pauli solver: requires exactly two wells");
  const double gp = p.gammas()[0] + p.gammas()[1];
  const double gm = p.gammas()[0] - p.gammas()[1];
  const double de = p.epsilons()[0] - p.epsilons()[1];
  const double j = p.coupling();
  const double gp2 = gp * gp, gm2 = gm * gm;
  return gp2 * (gp2 - gm2 + 4.0 * j * j) + de * de * (gp2 - gm2);
}

PauliSolution solve_pauli_2mode(const model::WellParameters& p) {
  PauliSolution out;
  out.coefficient_matrix = pauli_coefficient_matrix(p);
  out.determinant_value = pauli_determinant(p);

  Eigen::JacobiSVD<Eigen::Matrix4d> svd(out.coefficient_matrix, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const double tol = kNullspaceTolerance * out.coefficient_matrix.norm();

  std::vector<Eigen::Vector4d> null;
  for (int k = 0; k < 4; ++k)
    if (out.singular_values(k) <= tol) null.push_back(svd.matrixV().col(k));
  out.family_dimension = static_cast<int>(null.size());
  if (null.empty()) return out;

  // Canonical basis: project e_0..e_3 onto the null space in order and
  // orthonormalise, so the result depends only on the subspace.
  Eigen::Matrix<double, 4, Eigen::Dynamic> q(4, null.size());
  for (std::size_t k = 0; k < null.size(); ++k) q.col(k) = null[k];
  const Eigen::Matrix4d projector = q * q.transpose();
  std::vector<Eigen::Vector4d> accepted;
  for (int axis = 0; axis < 4 && accepted.size() < null.size(); ++axis) {
    Eigen::Vector4d v = projector.col(axis);
    for (const auto& a : accepted) v -= a.dot(v) * a;
    if (v.norm() < 1e-6) continue;
    v.normalize();
    for (int k = 0; k < 4; ++k) {
      if (std::abs(v(k)) > 1e-12) {
        if (v(k) < 0.0) v = -v;
        break;
      }
    }
    accepted.push_back(v);
  }
  for (const auto& v : accepted)
    out.basis.push_back({unsigned_zero(v(0)), unsigned_zero(v(1)), unsigned_zero(v(2)),
                         unsigned_zero(v(3))});
  return out;
}

ComplexMatrix pauli_matrix(const PauliVector& s) {
  const Complex i{0.0, 1.0};
  ComplexMatrix m(2, 2);
  m(0, 0) = s[0] + s[3];
  m(1, 1) = s[0] - s[3];
  m(0, 1) = s[1] - i * s[2];
  m(1, 0) = s[1] + i * s[2];
  return m;
}

std::optional<DeltaEpsilon> delta_epsilon_2mode(double gamma1, double gamma2, double coupling) {
  if (!(coupling > 0.0)) throw std::invalid_argument("delta_epsilon_2mode: J must be positive");
  const double prod = gamma1 * gamma2;
  const double j2 = coupling * coupling;
  if (!(prod < 0.0)) return std::nullopt;
  if (prod < -j2 * (1.0 + 1e-12)) return std::nullopt;

  DeltaEpsilon d;
  d.boundary = std::abs(prod + j2) <= 1e-12 * j2;
  // +i (g1 + g2) sqrt(1 + J^2/(g1 g2)) with a non-positive radicand.
  const double radicand = d.boundary ? 0.0 : std::max(0.0, -(1.0 + j2 / prod));
  d.plus = unsigned_zero(-(gamma1 + gamma2) * std::sqrt(radicand));
  d.minus = unsigned_zero(-d.plus);
  return d;
}

std::pair<Complex, Complex> eigen2_closed(const model::WellParameters& p) {
  if (p.wells() != 2) throw std::invalid_argument("eigen2_closed: requires exactly two wells");
  const Complex i{0.0, 1.0};
  const auto& e = p.epsilons();
  const auto& g = p.gammas();
  const double j = p.coupling();
  const Complex centre = (e[0] + e[1]) + i * (g[0] + g[1]);
  const Complex split = (e[0] - e[1]) + i * (g[0] - g[1]);
  const Complex root = std::sqrt(split * split + 4.0 * j * j);
  return {0.5 * (centre + root), 0.5 * (centre - root)};
}

// ---------------------------------------------------------------------------

std::array<double, 3> three_mode_conditions(const std::array<double, 3>& eps,
                                            const std::array<double, 3>& g, double coupling) {
  const auto [e1, e2, e3] = eps;
  const auto [g1, g2, g3] = g;
  const double j2 = coupling * coupling;
  return {
      g1 + g2 + g3,
      e1 * g2 + g1 * e2 + e2 * g3 + g2 * e3 + e1 * g3 + g1 * e3,
      // -Im det H; the cubic gain/loss term enters with a minus sign.
      g1 * e2 * e3 + e1 * g2 * e3 + e1 * e2 * g3 - g1 * g2 * g3 - j2 * (g1 + g3),
  };
}

ThreeModeSolution solve_3mode_gammas(const std::array<double, 3>& eps, double coupling) {
  if (!(coupling > 0.0)) throw std::invalid_argument("solve_3mode_gammas: J must be positive");
  const auto [e1, e2, e3] = eps;
  const double scale = 1.0 + std::max({std::abs(e1), std::abs(e2), std::abs(e3)});
  const double tol = 1e-12 * scale;
  const bool eq12 = std::abs(e1 - e2) <= tol;
  const bool eq23 = std::abs(e2 - e3) <= tol;
  const bool eq13 = std::abs(e1 - e3) <= tol;

  ThreeModeSolution out;
  if (eq12 && eq23) {
    out.hermitian = true;
    out.pt_family = true;
    return out;
  }
  if (eq13) {
    out.pt_family = true;
    return out;
  }
  if (eq12 || eq23) return out;

  const double d12 = e1 - e2, d23 = e2 - e3, d13 = e1 - e3;
  const double prod = d12 * d23;
  const double j2 = coupling * coupling;
  if (prod < 0.0 || prod > j2 * (1.0 + 1e-12)) return out;

  double g0sq = (d12 * d12 * d12 + d23 * d23 * d23 - d13 * d13 * d13 + 3.0 * j2 * d13) /
                (3.0 * d12 * d23 * d13);
  if (g0sq < 0.0) g0sq = 0.0;  // only reachable at prod ~ J^2 after the check above
  const double g0 = std::sqrt(g0sq);

  for (double sgn : {1.0, -1.0}) {
    const double g = sgn * g0;
    std::array<double, 3> t{unsigned_zero(-(e2 - e3) * g), unsigned_zero((e1 - e3) * g),
                            unsigned_zero(-(e1 - e2) * g)};
    const auto c = three_mode_conditions(eps, t, coupling);
    for (double r : c) out.max_residual = std::max(out.max_residual, std::abs(r));
    out.triples.push_back(t);
    out.gamma0.push_back(unsigned_zero(g));
  }
  return out;
}

double charpoly_reality_residual(const ComplexMatrix& h) {
  const auto p = linalg::char_poly(h);
  double worst = 0.0;
  for (const auto& c : p.coeffs) worst = std::max(worst, std::abs(c.imag()));
  return worst / (1.0 + p.max_abs());
}

}  // namespace symmwell::symmetriser
