#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "symmwell/linalg.hpp"
#include "symmwell/model.hpp"

namespace symmwell::symmetriser {

enum class Side { left, right };

/// A Hermitian Sigma with  Sigma H = H^H Sigma  (left) or  H Sigma = Sigma H^H
/// (right), together with its rank/kernel analysis.
struct Symmetriser {
  Side side = Side::left;
  ComplexMatrix matrix;
  int rank = 0;
  std::vector<ComplexVector> kernel;
  double residual = 0.0;
  /// Coefficients used in the construction, in term order.
  std::vector<Complex> coefficients;

  bool is_invertible() const { return kernel.empty(); }
};

/// Relative eigenvalue threshold below which a direction of Sigma counts as
/// kernel.
inline constexpr double kKernelTolerance = 1e-10;

/// Weights of the spectral construction. real_terms[k] multiplies the k-th
/// entry of classification.real_indices; pair_plus[m] multiplies the m-th
/// conjugate pair's  v^- (v^+)^H  term and its conjugate multiplies the
/// mirrored term. Empty lists mean "all ones".
struct SpectralCoefficients {
  std::vector<double> real_terms;
  std::vector<Complex> pair_plus;
};

/// Builds Sigma from a biorthonormal spectrum: outer products of left
/// (Side::left) or right (Side::right) eigenvectors over real eigenvalues and
/// cross terms over conjugate pairs. Isolated eigenvalues are left out, so
/// their partner eigenvectors span the kernel.
///
/// Throws std::invalid_argument for a spectrum that is not biorthonormal or a
/// coefficient list of the wrong length, ExceptionalPointError for an
/// EP-flagged spectrum.
Symmetriser build_spectral_symmetriser(const linalg::Spectrum& s, Side side,
                                       const SpectralCoefficients& coefficients = {});

/// Rank, kernel and residual of an arbitrary Sigma against H. Sigma is
/// Hermitian-projected first.
Symmetriser analyse_symmetriser(const ComplexMatrix& sigma, const ComplexMatrix& h, Side side);

/// ||Sigma H - H^H Sigma||_F  (left)  or  ||H Sigma - Sigma H^H||_F  (right),
/// divided by ||Sigma||_F ||H||_F.
double symmetrisation_residual(const ComplexMatrix& sigma, const ComplexMatrix& h, Side side);

/// ||Sl Sr' Sl - Sl||_F / ||Sl||_F where Sr' is Sr rescaled so that the
/// non-kernel eigenvalues of Sr Sl average to one.
double semi_inverse_residual(const ComplexMatrix& sigma_left, const ComplexMatrix& sigma_right);

/// ||[Sr Sl, H]||_F / (||Sr Sl||_F ||H||_F).
double quasi_commutator_residual(const ComplexMatrix& sigma_left,
                                 const ComplexMatrix& sigma_right, const ComplexMatrix& h);

/// Matrix part M of the antilinear map v -> M conj(v) built from the
/// eigenvectors: sum_m l_m l_m^T (left) or sum_m r_m r_m^T (right).
ComplexMatrix build_antilinear_t(const linalg::Spectrum& s, Side side);

/// ||M conj(H) - H^H M||_F (left) or ||H M - M conj(H^H)||_F (right),
/// divided by ||H||_F ||M||_F.
double antilinear_residual(const ComplexMatrix& m, const ComplexMatrix& h, Side side);

struct AntilinearSymmetry {
  /// N with A v = N conj(v).
  ComplexMatrix matrix;
  /// ||N conj(H) - H N||_F / (||H||_F ||N||_F).
  double residual = 0.0;
  bool commutes = false;
};

inline constexpr double kAntilinearConditionLimit = 1e8;
inline constexpr double kAntilinearTolerance = 1e-8;

/// Recovers the antilinear symmetry A = T_L^{-1} Sigma_L from a left
/// symmetriser and the left T matrix. Throws NumericalError when M_L is
/// singular or its condition number exceeds 1e8.
AntilinearSymmetry induced_antilinear_symmetry(const ComplexMatrix& sigma_left,
                                               const ComplexMatrix& t_left,
                                               const ComplexMatrix& h);

// ---------------------------------------------------------------------------
// Two-mode closed forms

using PauliVector = std::array<double, 4>;

struct PauliSolution {
  int family_dimension = 0;
  /// Orthonormal real basis of the null space, in (s0, s1, s2, s3) order.
  std::vector<PauliVector> basis;
  /// Closed-form determinant of the coefficient matrix.
  double determinant_value = 0.0;
  Eigen::Matrix4d coefficient_matrix;
  Eigen::Vector4d singular_values;
};

inline constexpr double kNullspaceTolerance = 1e-12;

/// Linear conditions on (s0..s3) from  Sigma H = H^H Sigma  with
/// Sigma = sum_n s_n sigma_n.
Eigen::Matrix4d pauli_coefficient_matrix(const model::WellParameters& p);

/// (g+)^2 [(g+)^2 - (g-)^2 + 4J^2] + (de)^2 [(g+)^2 - (g-)^2] with
/// g+- = gamma1 +- gamma2 and de = eps1 - eps2.
double pauli_determinant(const model::WellParameters& p);

/// Null space of the coefficient matrix. Throws std::invalid_argument for
/// N != 2.
PauliSolution solve_pauli_2mode(const model::WellParameters& p);

/// sum_n s_n sigma_n with the standard Pauli matrices.
ComplexMatrix pauli_matrix(const PauliVector& s);

struct DeltaEpsilon {
  /// Value of the branch with the + sign in front of i (g1 + g2).
  double plus = 0.0;
  double minus = 0.0;
  /// gamma1 gamma2 == -J^2 (to 1e-12 relative); both branches are zero.
  bool boundary = false;

  /// The branch with eps1 - eps2 >= 0.
  double non_negative() const { return plus >= 0.0 ? plus : minus; }
};

/// On-site energy difference eps1 - eps2 admitting a symmetriser, defined
/// for -J^2 <= gamma1 gamma2 < 0.
std::optional<DeltaEpsilon> delta_epsilon_2mode(double gamma1, double gamma2, double coupling);

/// Both two-mode eigenvalues from the closed form, principal square root.
std::pair<Complex, Complex> eigen2_closed(const model::WellParameters& p);

// ---------------------------------------------------------------------------
// Three-mode closed forms

struct ThreeModeSolution {
  /// Generic triples for gamma0 > 0 then gamma0 < 0.
  std::vector<std::array<double, 3>> triples;
  std::vector<double> gamma0;
  /// eps1 == eps3: gamma1 = -gamma3 free, gamma2 = 0.
  bool pt_family = false;
  /// All on-site energies equal: gamma = 0.
  bool hermitian = false;
  /// Worst residual of the three reality conditions over returned triples.
  double max_residual = 0.0;

  bool empty() const { return triples.empty() && !pt_family && !hermitian; }
};

/// Imaginary parts of the characteristic-polynomial coefficients for the
/// three-well chain, as the three balance conditions.
std::array<double, 3> three_mode_conditions(const std::array<double, 3>& eps,
                                            const std::array<double, 3>& gammas,
                                            double coupling);

/// Gain/loss triples for which the three-well Hamiltonian has a real
/// characteristic polynomial.
ThreeModeSolution solve_3mode_gammas(const std::array<double, 3>& eps, double coupling);

/// max_k |Im c_k| / (1 + max_k |c_k|).
double charpoly_reality_residual(const ComplexMatrix& h);

}  // namespace symmwell::symmetriser
