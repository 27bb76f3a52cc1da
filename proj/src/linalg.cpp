#include "symmwell/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace symmwell::linalg {

namespace {

constexpr double kInverseConditionLimit = 1e6;

// Unit 2-norm with the largest-modulus component made real and positive.
ComplexVector canonical(ComplexVector v) {
  const double n = v.norm();
  if (n == 0.0) return v;
  v /= n;
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > best) {
      best = std::abs(v(k));
      imax = k;
    }
  }
  const Complex phase = v(imax) / std::abs(v(imax));
  return v / phase;
}

double scale_of(const ComplexMatrix& m) {
  const double f = frobenius(m);
  return f > 0.0 ? f : 1.0;
}

void fill_diagnostics(const ComplexMatrix& m, EigenPair& p) {
  const double hn = scale_of(m);
  const double rn = p.right.norm();
  const double ln = p.left.norm();
  p.right_residual = (m * p.right - p.value * p.right).norm() / (hn * rn);
  p.left_residual =
      (p.left.adjoint() * m - p.value * p.left.adjoint()).norm() / (hn * ln);
  p.self_orthogonality = std::abs(p.left.dot(p.right)) / (ln * rn);
}

}  // namespace

Complex PolyCoeffs::operator()(Complex x) const {
  Complex acc{1.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double PolyCoeffs::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

PolyCoeffs char_poly(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("char_poly: matrix is not square");
  const Eigen::Index n = m.rows();
  std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
  c[n] = 1.0;
  ComplexMatrix mk = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = m * mk;
    mk.diagonal().array() += c[n - k + 1];
    c[n - k] = -(m * mk).trace() / static_cast<double>(k);
  }
  c.pop_back();
  return PolyCoeffs{std::move(c)};
}

Complex discriminant(const PolyCoeffs& p) {
  const auto& c = p.coeffs;
  switch (p.degree()) {
    case 2:
      return c[1] * c[1] - 4.0 * c[0];
    case 3: {
      const Complex a = c[2], b = c[1], d = c[0];
      return 18.0 * a * b * d - 4.0 * a * a * a * d + a * a * b * b - 4.0 * b * b * b -
             27.0 * d * d;
    }
    default: {
      std::ostringstream os;
      os << "discriminant: unsupported degree " << p.degree() << " (only 2 and 3)";
      throw std::invalid_argument(os.str());
    }
  }
}

PolyCoeffs poly_from_roots(std::span<const Complex> roots) {
  // Full coefficient list, lowest degree first, leading 1 included.
  std::vector<Complex> a{Complex{1.0}};
  for (const Complex& r : roots) {
    std::vector<Complex> next(a.size() + 1, Complex{});
    for (std::size_t i = 0; i < a.size(); ++i) {
      next[i + 1] += a[i];
      next[i] -= r * a[i];
    }
    a = std::move(next);
  }
  a.pop_back();
  return PolyCoeffs{std::move(a)};
}

std::vector<Complex> Spectrum::values() const {
  std::vector<Complex> v;
  v.reserve(pairs.size());
  for (const auto& p : pairs) v.push_back(p.value);
  return v;
}

double Spectrum::min_self_orthogonality() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) m = std::min(m, p.self_orthogonality);
  return m;
}

PairingClassification classify_pairing(std::span<const Complex> values, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("classify_pairing: tolerance must be positive");
  const int n = static_cast<int>(values.size());
  PairingClassification out;
  out.tolerance = tol;
  std::vector<bool> taken(n, false);
  for (int i = 0; i < n; ++i) {
    if (std::abs(values[i].imag()) <= tol * (1.0 + std::abs(values[i]))) {
      taken[i] = true;
      out.real_indices.push_back(i);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (taken[i]) continue;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i || taken[j]) continue;
      const double d = std::abs(values[i] - std::conj(values[j]));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    taken[i] = true;
    if (best >= 0 && best_d <= tol * (1.0 + std::abs(values[i]))) {
      taken[best] = true;
      out.conjugate_pairs.emplace_back(std::min(i, best), std::max(i, best));
    } else {
      out.isolated_indices.push_back(i);
    }
  }
  return out;
}

Spectrum eig(const ComplexMatrix& m, double pairing_tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eig: matrix is not square");
  if (m.rows() < 1 || m.rows() > kMaxDim)
    throw std::invalid_argument("eig: dimension must be in 1..16");
  if (!m.allFinite()) throw std::invalid_argument("eig: matrix has non-finite entries");

  const Eigen::Index n = m.rows();
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    // Best available: residual of whatever Schur form was reached.
    double best = std::numeric_limits<double>::infinity();
    if (solver.eigenvalues().allFinite()) {
      const ComplexMatrix& v = solver.eigenvectors();
      best = (m * v - v * solver.eigenvalues().asDiagonal()).norm() / scale_of(m);
    }
    throw NumericalError("eig: QR iteration did not converge", best);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
    return ev(a).imag() < ev(b).imag();
  });

  ComplexMatrix right(n, n);
  ComplexVector values(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    values(k) = ev(order[k]);
    right.col(k) = canonical(solver.eigenvectors().col(order[k]));
  }

  ComplexMatrix left(n, n);
  if (condition_number(right) <= kInverseConditionLimit) {
    // Rows of R^{-1} are the left eigenvectors, biorthogonal by construction.
    const ComplexMatrix inv = right.inverse();
    for (Eigen::Index k = 0; k < n; ++k) left.col(k) = canonical(inv.row(k).adjoint());
  } else {
    for (Eigen::Index k = 0; k < n; ++k) {
      ComplexMatrix shifted = m.adjoint();
      shifted.diagonal().array() -= std::conj(values(k));
      Eigen::JacobiSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullV);
      left.col(k) = canonical(svd.matrixV().col(n - 1));
    }
  }

  Spectrum s;
  s.matrix = m;
  s.normalization = Normalization::hermitian;
  s.pairs.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    auto& p = s.pairs[k];
    p.value = values(k);
    p.right = right.col(k);
    p.left = left.col(k);
    fill_diagnostics(m, p);
    if (p.self_orthogonality < kSelfOrthogonalityFloor) s.degenerate = true;
  }
  const auto vals = s.values();
  s.classification = classify_pairing(vals, pairing_tol);
  return s;
}

Spectrum biorthonormalize(const Spectrum& s, BiorthogonalGauge gauge) {
  for (const auto& p : s.pairs) {
    if (p.self_orthogonality < kSelfOrthogonalityFloor) {
      std::ostringstream os;
      os.precision(17);
      os << "biorthonormalize: eigenvector of eigenvalue (" << p.value.real() << ", "
         << p.value.imag() << ") is self-orthogonal (|l^H r| = " << p.self_orthogonality
         << "); exceptional point";
      throw ExceptionalPointError(os.str(), p.self_orthogonality);
    }
  }
  Spectrum out = s;
  for (auto& p : out.pairs) {
    switch (gauge) {
      case BiorthogonalGauge::unit_right: {
        p.right /= p.right.norm();
        const Complex overlap = p.left.dot(p.right);  // l^H r
        p.left /= std::conj(overlap);
        break;
      }
      case BiorthogonalGauge::complex_symmetric: {
        const Complex rr = p.right.transpose() * p.right;
        if (std::abs(rr) < kSelfOrthogonalityFloor * p.right.squaredNorm())
          throw ExceptionalPointError(
              "biorthonormalize: r^T r vanishes; complex-symmetric gauge unavailable",
              std::abs(rr));
        p.right /= std::sqrt(rr);
        p.left = p.right.conjugate();
        break;
      }
    }
    fill_diagnostics(out.matrix, p);
  }
  out.normalization = Normalization::biorthogonal;
  return out;
}

double biorthogonality_defect(const Spectrum& s) {
  double worst = 0.0;
  for (int i = 0; i < s.size(); ++i)
    for (int j = 0; j < s.size(); ++j) {
      const Complex ov = s.pairs[i].left.dot(s.pairs[j].right);
      worst = std::max(worst, std::abs(ov - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double frobenius(const ComplexMatrix& m) { return m.norm(); }

bool is_complex_symmetric(const ComplexMatrix& m) {
  return m.rows() == m.cols() && m == m.transpose();
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= rel_tol * m.norm();
}

double condition_number(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

}  // namespace symmwell::linalg
