#pragma once

#include <vector>

#include "symmwell/linalg.hpp"

namespace symmwell::model {

/// Physical parameters of an N-well tight-binding chain with local gain
/// (gamma > 0) and loss (gamma < 0) and uniform nearest-neighbour coupling.
class WellParameters {
 public:
  /// Throws std::invalid_argument unless N >= 2, the lists have equal
  /// length, every entry is finite and coupling > 0.
  WellParameters(std::vector<double> epsilons, std::vector<double> gammas,
                 double coupling = 1.0);

  int wells() const { return static_cast<int>(epsilons_.size()); }
  const std::vector<double>& epsilons() const { return epsilons_; }
  const std::vector<double>& gammas() const { return gammas_; }
  double coupling() const { return coupling_; }
  double max_abs_gamma() const;

 private:
  std::vector<double> epsilons_;
  std::vector<double> gammas_;
  double coupling_;
};

/// Tridiagonal complex-symmetric Hamiltonian: eps_k + i gamma_k on the
/// diagonal, -J on the first off-diagonals.
ComplexMatrix build_hamiltonian(const WellParameters& p);

/// Adds c to every on-site energy; the spectrum shifts by exactly c.
WellParameters shift_energy(const WellParameters& p, double c);

/// Mirror-symmetric real potential and mirror-antisymmetric gain/loss.
bool is_pt_symmetric(const WellParameters& p, double tol);

/// Mirror-antisymmetric real potential and mirror-symmetric gain/loss. This
/// is a statement about the potential only; the hopping term is left out.
bool is_anti_pt_potential(const WellParameters& p, double tol);

/// Exchange (site-reversal) matrix.
Eigen::MatrixXd parity(int n);

/// ||P conj(H) - H P||_F, the matrix part of [PT, H].
double pt_commutator_norm(const WellParameters& p);
/// ||P conj(H) + H P||_F, the matrix part of {PT, H}. Nonzero for the
/// anti-PT potentials whenever J > 0, because -J is invariant under PT.
double pt_anticommutator_norm(const WellParameters& p);

/// A state in the well basis. Occupations are |psi_k|^2.
struct StateVector {
  ComplexVector amplitudes;

  std::vector<double> occupations() const;
};

/// sum_k |psi_k|^2 gamma_k. Throws std::invalid_argument on size mismatch.
double state_balance(const StateVector& s, const WellParameters& p);
double state_balance(const ComplexVector& psi, const WellParameters& p);

}  // namespace symmwell::model
