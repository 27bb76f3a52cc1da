#include "symmwell/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace symmwell::model {

WellParameters::WellParameters(std::vector<double> epsilons, std::vector<double> gammas,
                               double coupling)
    : epsilons_(std::move(epsilons)), gammas_(std::move(gammas)), coupling_(coupling) {
  if (epsilons_.size() < 2)
    throw std::invalid_argument("WellParameters: at least two wells are required");
  if (epsilons_.size() != gammas_.size()) {
    std::ostringstream os;
    os << "WellParameters: " << epsilons_.size() << " on-site energies but "
       << gammas_.size() << " gain/loss rates";
    throw std::invalid_argument(os.str());
  }
  if (static_cast<int>(epsilons_.size()) > linalg::kMaxDim)
    throw std::invalid_argument("WellParameters: at most 16 wells are supported");
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(epsilons_.begin(), epsilons_.end(), finite) ||
      !std::all_of(gammas_.begin(), gammas_.end(), finite))
    throw std::invalid_argument("WellParameters: non-finite entry");
  if (!(coupling_ > 0.0) || !std::isfinite(coupling_))
    throw std::invalid_argument("WellParameters: coupling J must be positive");
}

double WellParameters::max_abs_gamma() const {
  double m = 0.0;
  for (double g : gammas_) m = std::max(m, std::abs(g));
  return m;
}

ComplexMatrix build_hamiltonian(const WellParameters& p) {
  const int n = p.wells();
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    h(k, k) = Complex{p.epsilons()[k], p.gammas()[k]};
    if (k + 1 < n) {
      h(k, k + 1) = -p.coupling();
      h(k + 1, k) = -p.coupling();
    }
  }
  return h;
}

WellParameters shift_energy(const WellParameters& p, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("shift_energy: shift must be finite");
  auto eps = p.epsilons();
  for (double& e : eps) e += c;
  return WellParameters(std::move(eps), p.gammas(), p.coupling());
}

bool is_pt_symmetric(const WellParameters& p, double tol) {
  const int n = p.wells();
  const auto& e = p.epsilons();
  const auto& g = p.gammas();
  for (int k = 0; k < n; ++k) {
    const int m = n - 1 - k;
    if (std::abs(e[k] - e[m]) > tol || std::abs(g[k] + g[m]) > tol) return false;
  }
  return true;
}

bool is_anti_pt_potential(const WellParameters& p, double tol) {
  const int n = p.wells();
  const auto& e = p.epsilons();
  const auto& g = p.gammas();
  for (int k = 0; k < n; ++k) {
    const int m = n - 1 - k;
    if (std::abs(e[k] + e[m]) > tol || std::abs(g[k] - g[m]) > tol) return false;
  }
  return true;
}

Eigen::MatrixXd parity(int n) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) p(k, n - 1 - k) = 1.0;
  return p;
}

double pt_commutator_norm(const WellParameters& p) {
  const ComplexMatrix h = build_hamiltonian(p);
  const ComplexMatrix par = parity(p.wells()).cast<Complex>();
  return (par * h.conjugate() - h * par).norm();
}

double pt_anticommutator_norm(const WellParameters& p) {
  const ComplexMatrix h = build_hamiltonian(p);
  const ComplexMatrix par = parity(p.wells()).cast<Complex>();
  return (par * h.conjugate() + h * par).norm();
}

std::vector<double> StateVector::occupations() const {
  std::vector<double> n(static_cast<std::size_t>(amplitudes.size()));
  for (Eigen::Index k = 0; k < amplitudes.size(); ++k) n[k] = std::norm(amplitudes(k));
  return n;
}

double state_balance(const ComplexVector& psi, const WellParameters& p) {
  if (psi.size() != p.wells()) {
    std::ostringstream os;
    os << "state_balance: state has " << psi.size() << " amplitudes, system has "
       << p.wells() << " wells";
    throw std::invalid_argument(os.str());
  }
  double acc = 0.0;
  for (int k = 0; k < p.wells(); ++k) acc += std::norm(psi(k)) * p.gammas()[k];
  return acc;
}

double state_balance(const StateVector& s, const WellParameters& p) {
  return state_balance(s.amplitudes, p);
}

}  // namespace symmwell::model
