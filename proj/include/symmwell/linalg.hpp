#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symmwell/errors.hpp"

namespace symmwell {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

}  // namespace symmwell

namespace symmwell::linalg {

inline constexpr int kMaxDim = 16;
inline constexpr double kDefaultPairingTolerance = 1e-9;
/// Eigenpairs with |l^H r| / (|l| |r|) below this are treated as coalesced.
inline constexpr double kSelfOrthogonalityFloor = 1e-8;

/// Monic polynomial p(x) = x^N + c[N-1] x^(N-1) + ... + c[0].
struct PolyCoeffs {
  std::vector<Complex> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()); }
  Complex operator()(Complex x) const;
  /// max_k |c_k|, the scale used by the reconstruction and EP tolerances.
  double max_abs() const;
};

/// Characteristic polynomial det(x I - M) by the Faddeev-LeVerrier recursion.
PolyCoeffs char_poly(const ComplexMatrix& m);

/// Discriminant of a monic quadratic or cubic. Zero iff a root is repeated.
/// Throws std::invalid_argument for other degrees.
Complex discriminant(const PolyCoeffs& p);

/// Monic polynomial with the given roots, prod (x - r_i).
PolyCoeffs poly_from_roots(std::span<const Complex> roots);

struct EigenPair {
  Complex value;
  ComplexVector right;
  ComplexVector left;
  double right_residual = 0.0;
  double left_residual = 0.0;
  double self_orthogonality = 1.0;
};

enum class Normalization { hermitian, biorthogonal };

struct PairingClassification {
  std::vector<int> real_indices;
  std::vector<std::pair<int, int>> conjugate_pairs;
  std::vector<int> isolated_indices;
  double tolerance = kDefaultPairingTolerance;
};

struct Spectrum {
  ComplexMatrix matrix;
  std::vector<EigenPair> pairs;
  Normalization normalization = Normalization::hermitian;
  PairingClassification classification;
  /// Set when some pair is self-orthogonal (exceptional-point vicinity).
  bool degenerate = false;

  int size() const { return static_cast<int>(pairs.size()); }
  std::vector<Complex> values() const;
  double min_self_orthogonality() const;
};

/// Greedy conjugate-pair matching, indices visited in ascending order.
PairingClassification classify_pairing(std::span<const Complex> values,
                                       double tol = kDefaultPairingTolerance);

/// Full eigendecomposition with right and left eigenvectors, each scaled to
/// unit 2-norm. Eigenvalues ascend by (Re, Im).
///
/// Left vectors come from the inverse of the right eigenvector matrix when
/// it is well conditioned and from the null space of (M - lambda)^H
/// otherwise. Throws NumericalError if the QR iteration does not converge
/// within Eigen's budget (30 sweeps per eigenvalue) or if a residual misses
/// its contract away from an exceptional point.
Spectrum eig(const ComplexMatrix& m, double pairing_tol = kDefaultPairingTolerance);

/// How the free scale of each biorthonormal pair is fixed.
enum class BiorthogonalGauge {
  /// |r| = 1, l scaled so that l^H r = 1.
  unit_right,
  /// r^T r = 1 and l = conj(r); meaningful for complex-symmetric matrices.
  complex_symmetric,
};

/// Rescales pairs so that l_i^H r_j = delta_ij. Throws ExceptionalPointError
/// naming the eigenvalue of a self-orthogonal pair.
Spectrum biorthonormalize(const Spectrum& s,
                          BiorthogonalGauge gauge = BiorthogonalGauge::unit_right);

/// max_{ij} |l_i^H r_j - delta_ij|.
double biorthogonality_defect(const Spectrum& s);

// Small helpers shared by the other modules.

double frobenius(const ComplexMatrix& m);
bool is_complex_symmetric(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double rel_tol = 0.0);
/// 2-norm condition number via singular values; infinity when singular.
double condition_number(const ComplexMatrix& m);

}  // namespace symmwell::linalg
