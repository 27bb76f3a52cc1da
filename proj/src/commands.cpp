#include "symmwell/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "symmwell/explorer.hpp"
#include "symmwell/symmetriser.hpp"

namespace symmwell::cli {

namespace {

using nlohmann::ordered_json;
namespace ex = symmwell::explorer;
namespace sy = symmwell::symmetriser;

// JSON has no NaN; non-finite values become null.
ordered_json real_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ordered_json complex_json(Complex z) { return ordered_json::array({real_json(z.real()), real_json(z.imag())}); }

ordered_json vector_json(const ComplexVector& v) {
  auto a = ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(complex_json(v(k)));
  return a;
}

ordered_json matrix_json(const ComplexMatrix& m) {
  auto re = ordered_json::array();
  auto im = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto rr = ordered_json::array();
    auto ri = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(real_json(m(i, j).real()));
      ri.push_back(real_json(m(i, j).imag()));
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

ordered_json system_json(const model::WellParameters& p) {
  return {{"wells", p.wells()},
          {"epsilons", p.epsilons()},
          {"gammas", p.gammas()},
          {"coupling", p.coupling()}};
}

ordered_json pairing_json(const linalg::PairingClassification& c) {
  auto pairs = ordered_json::array();
  for (const auto& [a, b] : c.conjugate_pairs) pairs.push_back({a, b});
  return {{"tolerance", c.tolerance},
          {"real", c.real_indices},
          {"conjugate_pairs", pairs},
          {"isolated", c.isolated_indices}};
}

std::string state_class(const linalg::PairingClassification& c, int k) {
  if (std::find(c.real_indices.begin(), c.real_indices.end(), k) != c.real_indices.end())
    return "real";
  if (std::find(c.isolated_indices.begin(), c.isolated_indices.end(), k) !=
      c.isolated_indices.end())
    return "isolated";
  return "pair";
}

ordered_json symmetriser_json(const sy::Symmetriser& s) {
  return {{"rank", s.rank},
          {"kernel_dimension", s.kernel.size()},
          {"residual", real_json(s.residual)},
          {"matrix", matrix_json(s.matrix)}};
}

void emit(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

std::array<double, 3> three_epsilons(const Config& c) {
  if (c.epsilons.size() != 3)
    throw ConfigError("epsilons", "this command needs exactly three on-site energies");
  return {c.epsilons[0], c.epsilons[1], c.epsilons[2]};
}

// ---------------------------------------------------------------------------

int cmd_eigs(const Config& c, std::ostream& out) {
  const auto p = c.system();
  const ComplexMatrix h = model::build_hamiltonian(p);
  const auto s = linalg::eig(h, c.tolerance);
  auto eigs = ordered_json::array();
  for (const auto& pr : s.pairs) {
    eigs.push_back({{"value", complex_json(pr.value)},
                    {"right_residual", pr.right_residual},
                    {"left_residual", pr.left_residual},
                    {"self_orthogonality", pr.self_orthogonality},
                    {"right", vector_json(pr.right)},
                    {"left", vector_json(pr.left)}});
  }
  emit(out, {{"system", system_json(p)},
             {"hamiltonian", matrix_json(h)},
             {"eigenpairs", eigs},
             {"pairing", pairing_json(s.classification)},
             {"degenerate", s.degenerate}});
  return kSuccess;
}

int cmd_check(const Config& c, std::ostream& out) {
  const auto p = c.system();
  const ComplexMatrix h = model::build_hamiltonian(p);
  const auto s = linalg::eig(h, c.tolerance);
  auto states = ordered_json::array();
  for (int k = 0; k < s.size(); ++k) {
    const auto& pr = s.pairs[k];
    states.push_back({{"value", complex_json(pr.value)},
                      {"class", state_class(s.classification, k)},
                      {"balance", model::state_balance(pr.right, p)}});
  }
  emit(out, {{"system", system_json(p)},
             {"reality_residual", sy::charpoly_reality_residual(h)},
             {"pt_symmetric", model::is_pt_symmetric(p, c.tolerance)},
             {"anti_pt_potential", model::is_anti_pt_potential(p, c.tolerance)},
             {"pt_commutator_norm", model::pt_commutator_norm(p)},
             {"pt_anticommutator_norm", model::pt_anticommutator_norm(p)},
             {"pairing", pairing_json(s.classification)},
             {"states", states}});
  return kSuccess;
}

int cmd_symmetrise(const Config& c, std::ostream& out) {
  const auto p = c.system();
  const ComplexMatrix h = model::build_hamiltonian(p);
  const auto raw = linalg::eig(h, c.tolerance);
  const auto s = linalg::biorthonormalize(raw);
  const auto left = sy::build_spectral_symmetriser(s, sy::Side::left);
  const auto right = sy::build_spectral_symmetriser(s, sy::Side::right);
  const ComplexMatrix tl = sy::build_antilinear_t(s, sy::Side::left);
  const ComplexMatrix tr = sy::build_antilinear_t(s, sy::Side::right);

  ordered_json induced = nullptr;
  std::string induced_note;
  try {
    const auto a = sy::induced_antilinear_symmetry(left.matrix, tl, h);
    induced = {{"residual", a.residual}, {"commutes", a.commutes}};
  } catch (const NumericalError& e) {
    induced_note = e.what();
  }

  auto values = ordered_json::array();
  for (const auto& pr : s.pairs) values.push_back(complex_json(pr.value));
  ordered_json doc = {{"system", system_json(p)},
                      {"eigenvalues", values},
                      {"pairing", pairing_json(s.classification)},
                      {"biorthogonality_defect", linalg::biorthogonality_defect(s)},
                      {"left", symmetriser_json(left)},
                      {"right", symmetriser_json(right)},
                      {"semi_inverse_residual", sy::semi_inverse_residual(left.matrix, right.matrix)},
                      {"quasi_commutator_residual",
                       sy::quasi_commutator_residual(left.matrix, right.matrix, h)},
                      {"antilinear",
                       {{"left_residual", sy::antilinear_residual(tl, h, sy::Side::left)},
                        {"right_residual", sy::antilinear_residual(tr, h, sy::Side::right)}}},
                      {"induced_symmetry", induced}};
  if (!induced_note.empty()) doc["induced_symmetry_note"] = induced_note;
  emit(out, doc);
  return kSuccess;
}

int cmd_solve2(const Config& c, std::ostream& out) {
  const auto p = c.system();
  if (p.wells() != 2) throw ConfigError("wells", "solve2 needs a two-well system");
  const auto sol = sy::solve_pauli_2mode(p);
  const ComplexMatrix h = model::build_hamiltonian(p);

  auto basis = ordered_json::array();
  for (const auto& v : sol.basis) {
    const auto a = sy::analyse_symmetriser(sy::pauli_matrix(v), h, sy::Side::left);
    basis.push_back({{"s", v}, {"rank", a.rank}, {"residual", a.residual}});
  }
  ordered_json de = nullptr;
  if (const auto d = sy::delta_epsilon_2mode(p.gammas()[0], p.gammas()[1], p.coupling()))
    de = {{"plus", d->plus}, {"minus", d->minus}, {"boundary", d->boundary}};
  const auto [mp, mm] = sy::eigen2_closed(p);
  std::vector<double> sv(sol.singular_values.data(), sol.singular_values.data() + 4);

  emit(out, {{"system", system_json(p)},
             {"family_dimension", sol.family_dimension},
             {"determinant", sol.determinant_value},
             {"singular_values", sv},
             {"basis", basis},
             {"delta_epsilon", de},
             {"mu_plus", complex_json(mp)},
             {"mu_minus", complex_json(mm)}});
  return sol.family_dimension == 0 ? kNotAdmissible : kSuccess;
}

int cmd_solve3(const Config& c, std::ostream& out, std::ostream& err) {
  const auto eps = three_epsilons(c);
  const auto sol = sy::solve_3mode_gammas(eps, c.coupling);
  auto triples = ordered_json::array();
  for (const auto& t : sol.triples) triples.push_back(t);
  emit(out, {{"epsilons", eps},
             {"coupling", c.coupling},
             {"admissible", !sol.empty()},
             {"hermitian", sol.hermitian},
             {"pt_family", sol.pt_family},
             {"gamma0", sol.gamma0},
             {"triples", triples},
             {"max_residual", sol.max_residual}});
  if (sol.empty()) {
    err << "solve3: no gain/loss triple gives a real characteristic polynomial here\n";
    return kNotAdmissible;
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct Csv {
  std::ostream& out;
  bool first = true;

  Csv& operator<<(double x) { return put(format_real(x)); }
  Csv& operator<<(int x) { return put(std::to_string(x)); }
  Csv& operator<<(bool x) { return put(x ? "1" : "0"); }
  Csv& operator<<(std::string_view s) { return put(std::string(s)); }
  Csv& operator<<(Complex z) { return *this << z.real() << z.imag(); }
  void end() {
    out << '\n';
    first = true;
  }

 private:
  Csv& put(const std::string& s) {
    if (!first) out << ',';
    out << s;
    first = false;
    return *this;
  }
};

int cmd_sweep2(const Config& c, std::ostream& out) {
  ex::Parametrisation par;
  par.kind = *ex::parse_parametrisation(c.sweep2.par);
  const auto rows = ex::sweep_2mode(par, c.sweep2.gamma_min, c.sweep2.gamma_max, c.sweep2.steps,
                                    c.coupling, c.sweep2.sign);
  out << "gamma,gamma1,gamma2,eps1,eps2,admissible,re_mu_plus,im_mu_plus,re_mu_minus,"
         "im_mu_minus,gamma_within_J\n";
  Csv csv{out};
  for (const auto& r : rows) {
    csv << r.gamma << r.gamma1 << r.gamma2 << r.eps1 << r.eps2 << r.admissible << r.mu_plus
        << r.mu_minus << r.within_coupling;
    csv.end();
  }
  return kSuccess;
}

void sample3_columns(Csv& csv, const ex::RegionSample3& s) {
  csv << s.gammas[0] << s.gammas[1] << s.gammas[2] << ex::to_string(s.region);
  for (const auto& l : s.eigenvalues) csv << l;
}

int cmd_sweep3(const Config& c, std::ostream& out) {
  const auto rows = ex::sweep_3mode_antipt(c.sweep3.eps_min, c.sweep3.eps_max, c.sweep3.steps,
                                           c.coupling, c.sweep3.gamma0_sign,
                                           {effective_threads(c)});
  out << "eps1,gamma1,gamma2,gamma3,class,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3\n";
  Csv csv{out};
  for (const auto& r : rows) {
    csv << r.eps[0];
    sample3_columns(csv, r);
    csv.end();
  }
  return kSuccess;
}

int cmd_map2(const Config& c, std::ostream& out) {
  const auto rows = ex::map_2mode_region(c.map2.gamma1, c.map2.gamma2, c.map2.resolution,
                                         c.coupling, {effective_threads(c)});
  out << "i,j,gamma1,gamma2,class,delta_eps,re_mu_plus,im_mu_plus,re_mu_minus,im_mu_minus\n";
  Csv csv{out};
  for (const auto& r : rows) {
    csv << r.i << r.j << r.gamma1 << r.gamma2 << ex::to_string(r.region) << r.delta_eps
        << r.mu_plus << r.mu_minus;
    csv.end();
  }
  return kSuccess;
}

int cmd_map3(const Config& c, std::ostream& out) {
  ex::PlaneSpec plane;
  plane.fixed_axis = c.map3.fixed_axis;
  plane.fixed_value = c.map3.fixed_value;
  plane.u_range = c.map3.u;
  plane.v_range = c.map3.v;
  plane.resolution = c.map3.resolution;
  const auto axes = plane.swept_axes();
  const unsigned threads = effective_threads(c);
  const int n = plane.resolution;
  std::vector<ex::RegionSample3> rows;
  if (c.map3.gamma0_sign > 0) {
    rows = ex::map_3mode_region(plane, c.coupling, {threads});
  } else {
    rows.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::array<double, 3> eps{};
        eps[plane.fixed_axis] = plane.fixed_value;
        eps[axes[0]] = ex::grid_point(plane.u_range.first, plane.u_range.second, i, n);
        eps[axes[1]] = ex::grid_point(plane.v_range.first, plane.v_range.second, j, n);
        auto s = ex::classify_3mode(eps, c.coupling, -1);
        s.i = i;
        s.j = j;
        rows[static_cast<std::size_t>(i) * n + j] = s;
      }
  }
  out << "i,j,eps1,eps2,eps3,gamma1,gamma2,gamma3,class,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3\n";
  Csv csv{out};
  for (const auto& r : rows) {
    csv << r.i << r.j << r.eps[0] << r.eps[1] << r.eps[2];
    sample3_columns(csv, r);
    csv.end();
  }
  return kSuccess;
}

int cmd_ep(const Config& c, std::ostream& out) {
  const auto& name = c.ep.path;
  ex::Path path;
  if (const auto kind = ex::parse_parametrisation(name)) {
    ex::Parametrisation par;
    par.kind = *kind;
    path = ex::parametrised_dimer_path(par, c.coupling, c.ep.sign);
  } else if (name == "pt") {
    path = ex::pt_dimer_path(c.coupling);
  } else if (name == "antipt") {
    path = ex::antipt_trimer_path(c.coupling, c.ep.sign);
  } else {
    const int axis = name.back() - '1';
    path = ex::trimer_axis_path(three_epsilons(c), axis, c.coupling, c.ep.sign);
  }
  ex::EpOptions opt;
  opt.grid = c.ep.grid;
  opt.order_hint = c.ep.order;
  const auto found = ex::find_ep(path, c.ep.min, c.ep.max, opt);
  auto list = ordered_json::array();
  for (const auto& r : found) {
    list.push_back({{"location", r.location},
                    {"order", r.order},
                    {"discriminant_residual", r.discriminant_residual},
                    {"eigenvalue", complex_json(r.eigenvalue_at_ep)},
                    {"self_orthogonality", r.self_orthogonality},
                    {"bracket", {r.bracket.first, r.bracket.second}}});
  }
  emit(out, {{"path", name},
             {"coupling", c.coupling},
             {"interval", {c.ep.min, c.ep.max}},
             {"grid", c.ep.grid},
             {"exceptional_points", list}});
  return kSuccess;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"eigs",   "check",  "symmetrise", "solve2",
                                                 "solve3", "sweep2", "sweep3",     "map2",
                                                 "map3",   "ep"};
  return names;
}

unsigned effective_threads(const Config& config) {
  unsigned n = config.threads;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("SYMMWELL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && *end == '\0' && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int run(std::string_view command, const Config& config, std::ostream& out, std::ostream& err) {
  using Handler = std::function<int(const Config&, std::ostream&, std::ostream&)>;
  static const std::map<std::string, Handler, std::less<>> handlers = {
      {"eigs", [](const Config& c, std::ostream& o, std::ostream&) { return cmd_eigs(c, o); }},
      {"check", [](const Config& c, std::ostream& o, std::ostream&) { return cmd_check(c, o); }},
      {"symmetrise",
       [](const Config& c, std::ostream& o, std::ostream&) { return cmd_symmetrise(c, o); }},
      {"solve2", [](const Config& c, std::ostream& o, std::ostream&) { return cmd_solve2(c, o); }},
      {"solve3", cmd_solve3},
      {"sweep2", [](const Config& c, std::ostream& o, std::ostream&) { return cmd_sweep2(c, o); }},
      {"sweep3", [](const Config& c, std::ostream& o, std::ostream&) { return cmd_sweep3(c, o); }},
      {"map2", [](const Config& c, std::ostream& o, std::ostream&) { return cmd_map2(c, o); }},
      {"map3", [](const Config& c, std::ostream& o, std::ostream&) { return cmd_map3(c, o); }},
      {"ep", [](const Config& c, std::ostream& o, std::ostream&) { return cmd_ep(c, o); }},
  };
  const auto it = handlers.find(command);
  if (it == handlers.end()) {
    err << "unknown command '" << command << "'\n";
    return kInvalidConfig;
  }
  // Output is assembled in memory so a failing command leaves no partial file.
  std::ostringstream buffer;
  int code = kSuccess;
  try {
    validate(config);
    code = it->second(config, buffer, err);
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const PreconditionError& e) {
    err << "not admissible: " << e.what() << '\n';
    return kNotAdmissible;
  } catch (const ExceptionalPointError& e) {
    err << "exceptional point: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (best residual " << e.best_residual() << ")\n";
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  out << buffer.str();
  return code;
}

}  // namespace symmwell::cli
