#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "symmwell/commands.hpp"
#include "symmwell/config.hpp"

namespace cli = symmwell::cli;

namespace {

struct Overrides {
  std::string config_path;
  std::string out_path;
  std::vector<double> eps;
  std::vector<double> gammas;
  std::optional<double> coupling;
  std::optional<double> tol;
  std::optional<int> threads;

  std::optional<std::string> par;
  std::optional<double> gamma_min, gamma_max;
  std::optional<int> steps;
  std::optional<int> sign;

  std::optional<double> eps_min, eps_max;
  std::optional<int> gamma0_sign;

  std::vector<double> g1_range, g2_range, u_range, v_range;
  std::optional<int> resolution;
  std::optional<int> fixed_axis;
  std::optional<double> fixed_value;

  std::optional<std::string> path;
  std::optional<double> lo, hi;
  std::optional<int> grid;
  std::optional<int> order;
};

template <class T>
void set_if(const std::optional<T>& v, T& target) {
  if (v) target = *v;
}

cli::Range to_range(const std::vector<double>& v, const char* flag) {
  if (v.size() != 2) throw cli::ConfigError(flag, "expects two values: min max");
  return {v[0], v[1]};
}

void apply(const std::string& command, const Overrides& o, cli::Config& c) {
  if (!o.eps.empty()) c.epsilons = o.eps;
  if (!o.gammas.empty()) c.gammas = o.gammas;
  if (!o.eps.empty() || !o.gammas.empty()) c.wells.reset();
  set_if(o.coupling, c.coupling);
  set_if(o.tol, c.tolerance);
  if (o.threads) {
    if (*o.threads < 0) throw cli::ConfigError("threads", "must be non-negative");
    c.threads = static_cast<unsigned>(*o.threads);
  }

  if (command == "sweep2") {
    set_if(o.par, c.sweep2.par);
    set_if(o.gamma_min, c.sweep2.gamma_min);
    set_if(o.gamma_max, c.sweep2.gamma_max);
    set_if(o.steps, c.sweep2.steps);
    set_if(o.sign, c.sweep2.sign);
  } else if (command == "sweep3") {
    set_if(o.eps_min, c.sweep3.eps_min);
    set_if(o.eps_max, c.sweep3.eps_max);
    set_if(o.steps, c.sweep3.steps);
    set_if(o.gamma0_sign, c.sweep3.gamma0_sign);
  } else if (command == "map2") {
    if (!o.g1_range.empty()) c.map2.gamma1 = to_range(o.g1_range, "--gamma1-range");
    if (!o.g2_range.empty()) c.map2.gamma2 = to_range(o.g2_range, "--gamma2-range");
    set_if(o.resolution, c.map2.resolution);
  } else if (command == "map3") {
    set_if(o.fixed_axis, c.map3.fixed_axis);
    set_if(o.fixed_value, c.map3.fixed_value);
    if (!o.u_range.empty()) c.map3.u = to_range(o.u_range, "--u-range");
    if (!o.v_range.empty()) c.map3.v = to_range(o.v_range, "--v-range");
    set_if(o.resolution, c.map3.resolution);
    set_if(o.gamma0_sign, c.map3.gamma0_sign);
  } else if (command == "ep") {
    set_if(o.path, c.ep.path);
    set_if(o.lo, c.ep.min);
    set_if(o.hi, c.ep.max);
    set_if(o.grid, c.ep.grid);
    set_if(o.sign, c.ep.sign);
    if (o.order) c.ep.order = *o.order;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetrisers and exceptional points of few-well gain/loss chains"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config_path, "JSON configuration document");
  app.add_option("-o,--out", o.out_path, "output file (default: standard output)");
  app.add_option("--eps", o.eps, "on-site energies")->expected(1, 16)->allow_extra_args();
  app.add_option("--gammas", o.gammas, "gain/loss rates")->expected(1, 16)->allow_extra_args();
  app.add_option("-J,--coupling", o.coupling, "nearest-neighbour coupling J");
  app.add_option("--tol", o.tol, "pairing tolerance");
  app.add_option("--threads", o.threads, "worker threads (0 = all cores)");

  auto* eigs = app.add_subcommand("eigs", "spectrum, eigenvectors and pairing");
  auto* check = app.add_subcommand("check", "reality residual, PT predicates, per-state balance");
  auto* symm = app.add_subcommand("symmetrise", "spectral left/right symmetrisers and residuals");
  auto* solve2 = app.add_subcommand("solve2", "Pauli null space and on-site energy branches");
  auto* solve3 = app.add_subcommand("solve3", "gain/loss triples for three on-site energies");
  (void)eigs;
  (void)check;
  (void)symm;
  (void)solve2;
  (void)solve3;

  auto* sweep2 = app.add_subcommand("sweep2", "two-well parametrised sweep (CSV)");
  sweep2->add_option("--par", o.par, "parametrisation: a|b|c|d");
  sweep2->add_option("--gamma-min", o.gamma_min);
  sweep2->add_option("--gamma-max", o.gamma_max);
  sweep2->add_option("--steps", o.steps);
  sweep2->add_option("--sign", o.sign, "+1: eps1 > eps2, -1: eps1 < eps2");

  auto* sweep3 = app.add_subcommand("sweep3", "three-well anti-PT sweep (CSV)");
  sweep3->add_option("--eps-min", o.eps_min);
  sweep3->add_option("--eps-max", o.eps_max);
  sweep3->add_option("--steps", o.steps);
  sweep3->add_option("--gamma0-sign", o.gamma0_sign);

  auto* map2 = app.add_subcommand("map2", "two-well region map over (gamma1, gamma2) (CSV)");
  map2->add_option("--gamma1-range", o.g1_range)->expected(2);
  map2->add_option("--gamma2-range", o.g2_range)->expected(2);
  map2->add_option("--resolution", o.resolution);

  auto* map3 = app.add_subcommand("map3", "three-well region map on a coordinate plane (CSV)");
  map3->add_option("--fixed-axis", o.fixed_axis, "0, 1 or 2");
  map3->add_option("--fixed-value", o.fixed_value);
  map3->add_option("--u-range", o.u_range)->expected(2);
  map3->add_option("--v-range", o.v_range)->expected(2);
  map3->add_option("--resolution", o.resolution);
  map3->add_option("--gamma0-sign", o.gamma0_sign);

  auto* ep = app.add_subcommand("ep", "locate exceptional points along a path (JSON)");
  ep->add_option("--path", o.path, "pt|a|b|c|d|antipt|eps1|eps2|eps3");
  ep->add_option("--min", o.lo);
  ep->add_option("--max", o.hi);
  ep->add_option("--grid", o.grid);
  ep->add_option("--sign", o.sign);
  ep->add_option("--order", o.order);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInvalidConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  cli::Config config;
  try {
    if (!o.config_path.empty()) {
      std::ifstream in(o.config_path);
      if (!in) throw cli::ConfigError("--config", "cannot read " + o.config_path);
      std::stringstream text;
      text << in.rdbuf();
      config = cli::parse_config(text.str());
    }
    apply(command, o, config);
  } catch (const cli::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return cli::kInvalidConfig;
  }

  if (o.out_path.empty()) return cli::run(command, config, std::cout, std::cerr);
  std::ostringstream data;
  const int code = cli::run(command, config, data, std::cerr);
  if (!data.str().empty()) {
    std::ofstream file(o.out_path, std::ios::binary);
    if (!file) {
      std::cerr << "cannot write " << o.out_path << '\n';
      return cli::kInvalidConfig;
    }
    file << data.str();
  }
  return code;
}
