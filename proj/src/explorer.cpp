#include "symmwell/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "symmwell/symmetriser.hpp"

namespace symmwell::explorer {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const Complex kComplexNaN{kNaN, kNaN};

// Runs body(i) for i in [0, n). Each index writes only its own slot, so the
// output is independent of scheduling.
template <class Body>
void parallel_for(int n, unsigned threads, Body&& body) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(n));
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

void check_steps(int steps, const char* who) {
  if (steps < 2) {
    std::ostringstream os;
    os << who << ": need at least 2 steps, got " << steps;
    throw std::invalid_argument(os.str());
  }
}

void check_range(double lo, double hi, const char* who) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    std::ostringstream os;
    os << who << ": invalid range [" << lo << ", " << hi << "]";
    throw std::invalid_argument(os.str());
  }
}

// Gamma triple for a three-well point, or nullopt when none exists.
std::optional<std::pair<std::array<double, 3>, double>> trimer_gammas(
    const std::array<double, 3>& eps, double coupling, int gamma0_sign) {
  const auto sol = symmetriser::solve_3mode_gammas(eps, coupling);
  if (sol.empty()) return std::nullopt;
  if (sol.triples.empty()) return std::make_pair(std::array<double, 3>{0.0, 0.0, 0.0}, 0.0);
  const std::size_t k = gamma0_sign >= 0 ? 0 : 1;
  return std::make_pair(sol.triples[k], sol.gamma0[k]);
}

}  // namespace

std::pair<double, double> Parametrisation::gammas(double value, double coupling) const {
  switch (kind) {
    case ParametrisationKind::pt:
      return {value, -value};
    case ParametrisationKind::rotated:
      return {2.0 * value, -0.5 * value};
    case ParametrisationKind::shifted:
      return {value + 0.5, -value + 0.5};
    case ParametrisationKind::lunt_trap: {
      if (!(std::abs(value) < 1.0))
        throw std::invalid_argument("Lunt-trap parametrisation requires |a| < 1");
      return {coupling * std::sqrt((1.0 + value) / (1.0 - value)),
              -coupling * std::sqrt((1.0 - value) / (1.0 + value))};
    }
    case ParametrisationKind::custom:
      if (!custom) throw std::invalid_argument("custom parametrisation has no mapping");
      return custom(value);
  }
  return {kNaN, kNaN};
}

std::optional<ParametrisationKind> parse_parametrisation(std::string_view name) {
  if (name == "a" || name == "pt") return ParametrisationKind::pt;
  if (name == "b" || name == "rotated") return ParametrisationKind::rotated;
  if (name == "c" || name == "shifted") return ParametrisationKind::shifted;
  if (name == "d" || name == "lunt") return ParametrisationKind::lunt_trap;
  return std::nullopt;
}

std::string_view to_string(ParametrisationKind kind) {
  switch (kind) {
    case ParametrisationKind::pt: return "pt";
    case ParametrisationKind::rotated: return "rotated";
    case ParametrisationKind::shifted: return "shifted";
    case ParametrisationKind::lunt_trap: return "lunt";
    case ParametrisationKind::custom: return "custom";
  }
  return "?";
}

std::string_view to_string(RegionClass c) {
  switch (c) {
    case RegionClass::not_admissible: return "notAdmissible";
    case RegionClass::pt_line: return "ptLine";
    case RegionClass::semi_one_real: return "semiOneReal";
    case RegionClass::full_three_real: return "fullThreeReal";
    case RegionClass::full_one_real: return "fullOneReal";
    case RegionClass::hermitian: return "hermitian";
    case RegionClass::boundary: return "boundary";
  }
  return "?";
}

double grid_point(double lo, double hi, int k, int steps) {
  if (k == steps - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

// ---------------------------------------------------------------------------

std::vector<SweepRow2> sweep_2mode(const Parametrisation& par, double gamma_min, double gamma_max,
                                   int steps, double coupling, int sign) {
  check_steps(steps, "sweep_2mode");
  check_range(gamma_min, gamma_max, "sweep_2mode");
  std::vector<SweepRow2> rows(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    SweepRow2& row = rows[k];
    row.gamma = grid_point(gamma_min, gamma_max, k, steps);
    std::tie(row.gamma1, row.gamma2) = par.gammas(row.gamma, coupling);
    row.within_coupling = std::abs(row.gamma) <= coupling;
    const double j2 = coupling * coupling;
    row.boundary = std::abs(row.gamma1 * row.gamma2 + j2) <= 1e-12 * j2;

    const bool symmetric_trap = par.kind == ParametrisationKind::pt ||
                                par.kind == ParametrisationKind::lunt_trap;
    if (symmetric_trap) {
      // PT dimers are symmetrised by the exchange matrix for every gamma; the
      // Lunt trap sits on the boundary gamma1 gamma2 = -J^2 throughout.
      row.admissible = true;
      row.eps1 = row.eps2 = 0.0;
    } else {
      const auto de = symmetriser::delta_epsilon_2mode(row.gamma1, row.gamma2, coupling);
      if (!de) {
        row.admissible = false;
        row.eps1 = row.eps2 = kNaN;
        row.mu_plus = row.mu_minus = kComplexNaN;
        continue;
      }
      row.admissible = true;
      row.boundary = de->boundary;
      const double d = sign >= 0 ? de->non_negative() : -de->non_negative();
      row.eps1 = 0.5 * d;
      row.eps2 = -0.5 * d;
    }
    const model::WellParameters p({row.eps1, row.eps2}, {row.gamma1, row.gamma2}, coupling);
    std::tie(row.mu_plus, row.mu_minus) = symmetriser::eigen2_closed(p);
  }
  return rows;
}

RegionSample2 classify_2mode(double gamma1, double gamma2, double coupling, int sign) {
  RegionSample2 s;
  s.gamma1 = gamma1;
  s.gamma2 = gamma2;
  const double prod = gamma1 * gamma2;
  const double j2 = coupling * coupling;
  const double tol_prod = 1e-12 * (1.0 + j2);
  const double tol_sum = 1e-12 * (1.0 + std::abs(gamma1) + std::abs(gamma2));

  if (!(prod < 0.0) || prod < -j2 - tol_prod) {
    s.region = RegionClass::not_admissible;
    s.delta_eps = kNaN;
    s.mu_plus = s.mu_minus = kComplexNaN;
    return s;
  }
  if (std::abs(gamma1 + gamma2) <= tol_sum) {
    s.region = RegionClass::pt_line;
    s.delta_eps = 0.0;
  } else if (std::abs(prod + j2) <= tol_prod) {
    s.region = RegionClass::boundary;
    s.delta_eps = 0.0;
  } else {
    s.region = RegionClass::semi_one_real;
    const double radicand = std::max(0.0, -(1.0 + j2 / prod));
    const double magnitude = std::abs(gamma1 + gamma2) * std::sqrt(radicand);
    s.delta_eps = sign >= 0 ? magnitude : -magnitude;
  }
  const model::WellParameters p({0.5 * s.delta_eps, -0.5 * s.delta_eps}, {gamma1, gamma2},
                                coupling);
  std::tie(s.mu_plus, s.mu_minus) = symmetriser::eigen2_closed(p);
  return s;
}

std::vector<RegionSample2> map_2mode_region(std::pair<double, double> gamma1_range,
                                            std::pair<double, double> gamma2_range,
                                            int resolution, double coupling,
                                            const Options& options) {
  check_steps(resolution, "map_2mode_region");
  check_range(gamma1_range.first, gamma1_range.second, "map_2mode_region");
  check_range(gamma2_range.first, gamma2_range.second, "map_2mode_region");
  const int n = resolution;
  std::vector<RegionSample2> out(static_cast<std::size_t>(n) * n);
  parallel_for(n * n, options.threads, [&](int idx) {
    const int i = idx / n, j = idx % n;
    RegionSample2 s = classify_2mode(grid_point(gamma1_range.first, gamma1_range.second, i, n),
                                     grid_point(gamma2_range.first, gamma2_range.second, j, n),
                                     coupling);
    s.i = i;
    s.j = j;
    out[idx] = s;
  });
  return out;
}

// ---------------------------------------------------------------------------

std::array<int, 2> PlaneSpec::swept_axes() const {
  switch (fixed_axis) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    case 2: return {0, 1};
  }
  throw std::invalid_argument("PlaneSpec: fixed axis must be 0, 1 or 2");
}

RegionSample3 classify_3mode(const std::array<double, 3>& eps, double coupling,
                             int gamma0_sign) {
  RegionSample3 s;
  s.eps = eps;
  const auto sol = symmetriser::solve_3mode_gammas(eps, coupling);
  if (sol.empty()) {
    s.region = RegionClass::not_admissible;
    s.gamma0 = kNaN;
    s.gammas = {kNaN, kNaN, kNaN};
    s.eigenvalues = {kComplexNaN, kComplexNaN, kComplexNaN};
    return s;
  }
  if (sol.hermitian) {
    s.region = RegionClass::hermitian;
  } else if (sol.pt_family) {
    s.region = RegionClass::pt_line;
  } else {
    const std::size_t k = gamma0_sign >= 0 ? 0 : 1;
    s.gammas = sol.triples[k];
    s.gamma0 = sol.gamma0[k];
  }
  const model::WellParameters p({eps[0], eps[1], eps[2]}, {s.gammas[0], s.gammas[1], s.gammas[2]},
                                coupling);
  const auto spec = linalg::eig(model::build_hamiltonian(p));
  int real_count = 0;
  for (int k = 0; k < 3; ++k) {
    s.eigenvalues[k] = spec.pairs[k].value;
    if (std::abs(s.eigenvalues[k].imag()) <= kRealTolerance) ++real_count;
  }
  if (s.region == RegionClass::not_admissible) {
    if (s.gammas == std::array<double, 3>{0.0, 0.0, 0.0})
      s.region = RegionClass::hermitian;
    else
      s.region = real_count == 3 ? RegionClass::full_three_real : RegionClass::full_one_real;
  }
  return s;
}

std::vector<RegionSample3> map_3mode_region(const PlaneSpec& plane, double coupling,
                                            const Options& options) {
  check_steps(plane.resolution, "map_3mode_region");
  check_range(plane.u_range.first, plane.u_range.second, "map_3mode_region");
  check_range(plane.v_range.first, plane.v_range.second, "map_3mode_region");
  if (!std::isfinite(plane.fixed_value))
    throw std::invalid_argument("map_3mode_region: fixed value must be finite");
  const auto axes = plane.swept_axes();
  const int n = plane.resolution;
  std::vector<RegionSample3> out(static_cast<std::size_t>(n) * n);
  parallel_for(n * n, options.threads, [&](int idx) {
    const int i = idx / n, j = idx % n;
    std::array<double, 3> eps{};
    eps[plane.fixed_axis] = plane.fixed_value;
    eps[axes[0]] = grid_point(plane.u_range.first, plane.u_range.second, i, n);
    eps[axes[1]] = grid_point(plane.v_range.first, plane.v_range.second, j, n);
    RegionSample3 s = classify_3mode(eps, coupling);
    s.i = i;
    s.j = j;
    out[idx] = s;
  });
  return out;
}

std::vector<RegionSample3> sweep_3mode_antipt(double eps_min, double eps_max, int steps,
                                              double coupling, int gamma0_sign,
                                              const Options& options) {
  check_steps(steps, "sweep_3mode_antipt");
  check_range(eps_min, eps_max, "sweep_3mode_antipt");
  std::vector<RegionSample3> out(static_cast<std::size_t>(steps));
  parallel_for(steps, options.threads, [&](int k) {
    const double e = grid_point(eps_min, eps_max, k, steps);
    RegionSample3 s = classify_3mode({e, 0.0, -e}, coupling, gamma0_sign);
    s.i = k;
    out[k] = s;
  });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct PathSample {
  double t = 0.0;
  bool ok = false;
  double disc = 0.0;
};

struct PolyAt {
  linalg::PolyCoeffs poly;
  model::WellParameters params;
};

std::optional<PolyAt> poly_at(const Path& path, double t, double reality_tol) {
  auto p = path(t);
  if (!p) return std::nullopt;
  if (p->wells() != 2 && p->wells() != 3)
    throw std::invalid_argument("find_ep: only two- and three-well paths are supported");
  auto poly = linalg::char_poly(model::build_hamiltonian(*p));
  double worst = 0.0;
  for (const auto& c : poly.coeffs) worst = std::max(worst, std::abs(c.imag()));
  if (worst / (1.0 + poly.max_abs()) > reality_tol) {
    std::ostringstream os;
    os.precision(17);
    os << "find_ep: characteristic polynomial is not real at t = " << t
       << " (relative imaginary part " << worst / (1.0 + poly.max_abs()) << ")";
    throw PreconditionError(os.str());
  }
  return PolyAt{std::move(poly), std::move(*p)};
}

double real_disc(const linalg::PolyCoeffs& p) { return linalg::discriminant(p).real(); }

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

EPResult describe_ep(const PolyAt& at, double location, std::pair<double, double> bracket,
                     const EpOptions& options) {
  EPResult r;
  r.location = location;
  r.bracket = bracket;
  r.discriminant_residual = std::abs(linalg::discriminant(at.poly));

  r.order = 2;
  if (at.poly.degree() == 3) {
    const Complex a = at.poly.coeffs[2], b = at.poly.coeffs[1], c = at.poly.coeffs[0];
    // Depressed cubic y^3 + p y + q; a triple root needs p = q = 0.
    const Complex p = b - a * a / 3.0;
    const Complex q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double s = 1.0 + at.poly.max_abs();
    if (std::abs(p) <= options.triple_root_tolerance * s * s &&
        std::abs(q) <= options.triple_root_tolerance * s * s * s)
      r.order = 3;
  }

  const auto spec = linalg::eig(model::build_hamiltonian(at.params));
  if (r.order == 3) {
    Complex mean{};
    for (const auto& pr : spec.pairs) mean += pr.value;
    r.eigenvalue_at_ep = mean / static_cast<double>(spec.size());
    r.self_orthogonality = spec.min_self_orthogonality();
  } else {
    int bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec.size(); ++i)
      for (int j = i + 1; j < spec.size(); ++j) {
        const double d = std::abs(spec.pairs[i].value - spec.pairs[j].value);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    r.eigenvalue_at_ep = 0.5 * (spec.pairs[bi].value + spec.pairs[bj].value);
    r.self_orthogonality =
        std::min(spec.pairs[bi].self_orthogonality, spec.pairs[bj].self_orthogonality);
  }
  return r;
}

}  // namespace

std::vector<EPResult> find_ep(const Path& path, double lo, double hi, const EpOptions& options) {
  check_range(lo, hi, "find_ep");
  if (options.grid < 3) throw std::invalid_argument("find_ep: grid must have at least 3 points");

  std::vector<PathSample> samples(static_cast<std::size_t>(options.grid));
  for (int k = 0; k < options.grid; ++k) {
    auto& s = samples[k];
    s.t = grid_point(lo, hi, k, options.grid);
    if (auto at = poly_at(path, s.t, options.reality_tolerance)) {
      s.ok = true;
      s.disc = real_disc(at->poly);
    }
  }

  std::vector<EPResult> found;
  auto accept = [&](const EPResult& r) {
    if (!options.order_hint || *options.order_hint == r.order) found.push_back(r);
  };

  for (int k = 0; k + 1 < options.grid; ++k) {
    const auto& a = samples[k];
    const auto& b = samples[k + 1];
    if (a.ok && a.disc == 0.0) {
      const auto at = poly_at(path, a.t, options.reality_tolerance);
      accept(describe_ep(*at, a.t, {a.t, a.t}, options));
      continue;
    }
    if (!a.ok || !b.ok || b.disc == 0.0 || sign_of(a.disc) == sign_of(b.disc)) continue;

    double left = a.t, right = b.t, f_left = a.disc, f_right = b.disc;
    bool broken = false;
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (left + right);
      if (!(mid > left && mid < right)) break;
      const auto at = poly_at(path, mid, options.reality_tolerance);
      if (!at) {
        broken = true;
        break;
      }
      const double fm = real_disc(at->poly);
      if (fm == 0.0) {
        left = right = mid;
        f_left = f_right = 0.0;
        break;
      }
      if (sign_of(fm) == sign_of(f_left)) {
        left = mid;
        f_left = fm;
      } else {
        right = mid;
        f_right = fm;
      }
    }
    if (broken) continue;
    const double loc = std::abs(f_left) <= std::abs(f_right) ? left : right;
    const auto at = poly_at(path, loc, options.reality_tolerance);
    accept(describe_ep(*at, loc, {a.t, b.t}, options));
  }
  if (samples.back().ok && samples.back().disc == 0.0) {
    const auto at = poly_at(path, samples.back().t, options.reality_tolerance);
    accept(describe_ep(*at, samples.back().t, {samples.back().t, samples.back().t}, options));
  }

  // Touching zeros: |disc| has an interior minimum without a sign change.
  for (int k = 1; k + 1 < options.grid; ++k) {
    const auto& a = samples[k - 1];
    const auto& m = samples[k];
    const auto& b = samples[k + 1];
    if (!a.ok || !m.ok || !b.ok || m.disc == 0.0) continue;
    if (sign_of(a.disc) != sign_of(m.disc) || sign_of(b.disc) != sign_of(m.disc)) continue;
    if (!(std::abs(m.disc) < std::abs(a.disc) && std::abs(m.disc) <= std::abs(b.disc))) continue;

    double x0 = a.t, x1 = b.t;
    constexpr double kGolden = 0.6180339887498949;
    auto f = [&](double t) -> double {
      const auto at = poly_at(path, t, options.reality_tolerance);
      return at ? std::abs(real_disc(at->poly)) : std::numeric_limits<double>::infinity();
    };
    double c = x1 - kGolden * (x1 - x0), d = x0 + kGolden * (x1 - x0);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (x1 - x0) > 1e-15 * (1.0 + std::abs(x0)); ++it) {
      if (fc < fd) {
        x1 = d;
        d = c;
        fd = fc;
        c = x1 - kGolden * (x1 - x0);
        fc = f(c);
      } else {
        x0 = c;
        c = d;
        fc = fd;
        d = x0 + kGolden * (x1 - x0);
        fd = f(d);
      }
    }
    const double loc = fc < fd ? c : d;
    const auto at = poly_at(path, loc, options.reality_tolerance);
    if (!at) continue;
    const double scale = 1.0 + std::pow(at->poly.max_abs(), 3);
    if (std::abs(linalg::discriminant(at->poly)) > 1e-10 * scale) continue;
    EPResult r = describe_ep(*at, loc, {a.t, b.t}, options);
    // A Hermitian-like crossing is a diabolic point, not an EP.
    if (r.self_orthogonality >= 1e-3) continue;
    accept(r);
  }

  std::sort(found.begin(), found.end(),
            [](const EPResult& x, const EPResult& y) { return x.location < y.location; });
  return found;
}

Path pt_dimer_path(double coupling) {
  return [coupling](double t) -> std::optional<model::WellParameters> {
    return model::WellParameters({0.0, 0.0}, {t, -t}, coupling);
  };
}

Path parametrised_dimer_path(Parametrisation par, double coupling, int sign) {
  return [par = std::move(par), coupling, sign](double t) -> std::optional<model::WellParameters> {
    const auto [g1, g2] = par.gammas(t, coupling);
    if (par.kind == ParametrisationKind::pt || par.kind == ParametrisationKind::lunt_trap)
      return model::WellParameters({0.0, 0.0}, {g1, g2}, coupling);
    const auto de = symmetriser::delta_epsilon_2mode(g1, g2, coupling);
    if (!de) return std::nullopt;
    const double d = sign >= 0 ? de->non_negative() : -de->non_negative();
    return model::WellParameters({0.5 * d, -0.5 * d}, {g1, g2}, coupling);
  };
}

Path antipt_trimer_path(double coupling, int gamma0_sign) {
  return trimer_axis_path({0.0, 0.0, 0.0}, -1, coupling, gamma0_sign);
}

Path trimer_axis_path(std::array<double, 3> base, int axis, double coupling, int gamma0_sign) {
  if (axis < -1 || axis > 2) throw std::invalid_argument("trimer_axis_path: axis must be 0..2");
  return [base, axis, coupling, gamma0_sign](double t) -> std::optional<model::WellParameters> {
    std::array<double, 3> eps = base;
    if (axis < 0) {
      eps = {t, 0.0, -t};  // the anti-PT line
    } else {
      eps[axis] = t;
    }
    const auto g = trimer_gammas(eps, coupling, gamma0_sign);
    if (!g) return std::nullopt;
    const auto& [gam, g0] = *g;
    return model::WellParameters({eps[0], eps[1], eps[2]}, {gam[0], gam[1], gam[2]}, coupling);
  };
}

}  // namespace symmwell::explorer
