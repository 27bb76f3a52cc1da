#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "symmwell/linalg.hpp"
#include "symmwell/model.hpp"

namespace symmwell::explorer {

enum class ParametrisationKind { pt, rotated, shifted, lunt_trap, custom };

/// Maps a scalar gamma (or the Lunt-trap parameter a) to (gamma1, gamma2).
///   pt:        ( g,      -g      )
///   rotated:   ( 2g,     -g/2    )
///   shifted:   ( g + 1/2, -g + 1/2)
///   lunt_trap: ( J sqrt((1+a)/(1-a)), -J sqrt((1-a)/(1+a)) ),  |a| < 1
struct Parametrisation {
  ParametrisationKind kind = ParametrisationKind::pt;
  std::function<std::pair<double, double>(double)> custom;

  std::pair<double, double> gammas(double value, double coupling) const;
};

/// Parses "a"/"pt", "b"/"rotated", "c"/"shifted", "d"/"lunt".
std::optional<ParametrisationKind> parse_parametrisation(std::string_view name);
std::string_view to_string(ParametrisationKind kind);

enum class RegionClass {
  not_admissible,
  pt_line,
  semi_one_real,
  full_three_real,
  full_one_real,
  hermitian,
  boundary,
};

std::string_view to_string(RegionClass c);

/// Real-eigenvalue threshold on |Im lambda| used by all classifiers.
inline constexpr double kRealTolerance = 1e-8;

struct Options {
  /// Worker threads for grid evaluation; results do not depend on it.
  unsigned threads = 1;
};

// ---------------------------------------------------------------------------

struct SweepRow2 {
  double gamma = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  bool admissible = false;
  bool boundary = false;
  /// |gamma| <= J: the narrower admissibility bound stated in prose for the
  /// shifted parametrisation. Reported alongside, never used for filtering.
  bool within_coupling = false;
  Complex mu_plus;
  Complex mu_minus;
};

/// +1 selects eps1 > eps2, -1 eps1 < eps2.
std::vector<SweepRow2> sweep_2mode(const Parametrisation& par, double gamma_min, double gamma_max,
                                   int steps, double coupling, int sign = +1);

struct RegionSample2 {
  int i = 0;
  int j = 0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  RegionClass region = RegionClass::not_admissible;
  double delta_eps = 0.0;
  Complex mu_plus;
  Complex mu_minus;
};

/// Row-major over (gamma1 index i, gamma2 index j).
std::vector<RegionSample2> map_2mode_region(std::pair<double, double> gamma1_range,
                                            std::pair<double, double> gamma2_range,
                                            int resolution, double coupling,
                                            const Options& options = {});

/// Classifies a single (gamma1, gamma2) point; shared by the map and tests.
RegionSample2 classify_2mode(double gamma1, double gamma2, double coupling, int sign = +1);

struct RegionSample3 {
  int i = 0;
  int j = 0;
  std::array<double, 3> eps{};
  RegionClass region = RegionClass::not_admissible;
  std::array<double, 3> gammas{};
  double gamma0 = 0.0;
  std::array<Complex, 3> eigenvalues{};
};

/// A coordinate plane in (eps1, eps2, eps3): one axis held fixed, the other
/// two swept in ascending index order (u = lower index, v = higher index).
struct PlaneSpec {
  int fixed_axis = 2;
  double fixed_value = 0.0;
  std::pair<double, double> u_range{-1.5, 1.5};
  std::pair<double, double> v_range{-1.5, 1.5};
  int resolution = 101;

  std::array<int, 2> swept_axes() const;
};

/// Classifies one point of the three-well parameter space using the
/// gamma0 > 0 branch (or gamma0 < 0 when gamma0_sign < 0).
RegionSample3 classify_3mode(const std::array<double, 3>& eps, double coupling,
                             int gamma0_sign = +1);

/// Row-major over (u index i, v index j).
std::vector<RegionSample3> map_3mode_region(const PlaneSpec& plane, double coupling,
                                            const Options& options = {});

/// Anti-PT line eps = (e, 0, -e); rows ascend in e.
std::vector<RegionSample3> sweep_3mode_antipt(double eps_min, double eps_max, int steps,
                                              double coupling, int gamma0_sign = +1,
                                              const Options& options = {});

// ---------------------------------------------------------------------------

struct EPResult {
  double location = 0.0;
  int order = 2;
  double discriminant_residual = 0.0;
  Complex eigenvalue_at_ep;
  double self_orthogonality = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
};

/// A one-parameter family; nullopt marks parameter values with no admissible
/// system (these samples are skipped and never bracket an EP).
using Path = std::function<std::optional<model::WellParameters>(double)>;

struct EpOptions {
  int grid = 512;
  /// When set, only EPs of this order are returned.
  std::optional<int> order_hint;
  /// Reality tolerance of the characteristic polynomial along the path.
  double reality_tolerance = 1e-8;
  /// Depressed-cubic threshold for calling a root of order three.
  double triple_root_tolerance = 1e-6;
};

/// Scans the real discriminant of the characteristic polynomial along the
/// path, brackets sign changes (and near-zero minima whose eigenvectors are
/// self-orthogonal) and bisects to floating-point resolution.
///
/// Throws PreconditionError if the characteristic polynomial is not real
/// along the admissible part of the path, std::invalid_argument for a bad
/// interval or a system size other than 2 or 3.
std::vector<EPResult> find_ep(const Path& path, double lo, double hi, const EpOptions& options = {});

// Ready-made paths.

/// Two wells, eps = 0, gamma1 = -gamma2 = t.
Path pt_dimer_path(double coupling);
/// Two wells along a parametrisation with eps1 = -eps2 = delta_eps / 2.
Path parametrised_dimer_path(Parametrisation par, double coupling, int sign = +1);
/// Three wells, eps = (t, 0, -t), gammas from the closed form.
Path antipt_trimer_path(double coupling, int gamma0_sign = +1);
/// Three wells with eps[axis] = t and the other two fixed.
Path trimer_axis_path(std::array<double, 3> base, int axis, double coupling, int gamma0_sign = +1);

/// Evenly spaced grid lo + (hi - lo) k / (steps - 1).
double grid_point(double lo, double hi, int k, int steps);

}  // namespace symmwell::explorer
