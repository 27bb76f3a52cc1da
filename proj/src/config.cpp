#include "symmwell/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

#include "symmwell/explorer.hpp"

namespace symmwell::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& prefix) {
  if (!obj.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(join(prefix, key), "unknown key");
  }
}

double get_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "must be finite");
  return x;
}

int get_int(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e9) return static_cast<int>(x);
  }
  throw ConfigError(key, "must be an integer");
}

std::vector<double> get_reals(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key, "must be a list of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out.push_back(get_real(v[k], key + "[" + std::to_string(k) + "]"));
  return out;
}

Range get_range(const json& v, const std::string& key) {
  const auto r = get_reals(v, key);
  if (r.size() != 2) throw ConfigError(key, "must be a list [min, max]");
  return {r[0], r[1]};
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "must be a string");
  return v.get<std::string>();
}

template <class F>
void maybe(const json& obj, const char* key, F&& f) {
  if (auto it = obj.find(key); it != obj.end()) f(*it);
}

void check_range(const Range& r, const std::string& key) {
  if (!(r.second > r.first)) throw ConfigError(key, "max must exceed min");
}

void check_sign(int s, const std::string& key) {
  if (s != 1 && s != -1) throw ConfigError(key, "must be +1 or -1");
}

void check_count(int n, int lo, int hi, const std::string& key) {
  if (n < lo || n > hi) {
    std::ostringstream os;
    os << "must lie in [" << lo << ", " << hi << "], got " << n;
    throw ConfigError(key, os.str());
  }
}

bool is_dimer_path(const std::string& p) {
  return p == "pt" || explorer::parse_parametrisation(p).has_value();
}

}  // namespace

model::WellParameters Config::system() const {
  if (epsilons.empty()) throw ConfigError("epsilons", "required by this command");
  if (gammas.empty()) throw ConfigError("gammas", "required by this command");
  return model::WellParameters(epsilons, gammas, coupling);
}

void validate(const Config& c) {
  if (c.wells) check_count(*c.wells, 2, linalg::kMaxDim, "wells");
  const auto check_len = [&](const std::vector<double>& v, const char* key) {
    if (v.empty()) return;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (!std::isfinite(v[k])) throw ConfigError(std::string(key), "entries must be finite");
    if (c.wells && static_cast<int>(v.size()) != *c.wells) {
      std::ostringstream os;
      os << "length " << v.size() << " != wells " << *c.wells;
      throw ConfigError(key, os.str());
    }
    check_count(static_cast<int>(v.size()), 2, linalg::kMaxDim, std::string(key) + " length");
  };
  check_len(c.epsilons, "epsilons");
  check_len(c.gammas, "gammas");
  if (!c.epsilons.empty() && !c.gammas.empty() && c.epsilons.size() != c.gammas.size()) {
    std::ostringstream os;
    os << "length " << c.gammas.size() << " != epsilons length " << c.epsilons.size();
    throw ConfigError("gammas", os.str());
  }
  if (!(c.coupling > 0.0) || !std::isfinite(c.coupling))
    throw ConfigError("coupling", "must be positive");
  if (!(c.tolerance > 0.0) || !std::isfinite(c.tolerance))
    throw ConfigError("tolerance", "must be positive");

  if (!explorer::parse_parametrisation(c.sweep2.par))
    throw ConfigError("sweep2.par", "must be one of a, b, c, d, pt, rotated, shifted, lunt");
  check_range({c.sweep2.gamma_min, c.sweep2.gamma_max}, "sweep2.gamma_max");
  check_count(c.sweep2.steps, 2, 1000000, "sweep2.steps");
  check_sign(c.sweep2.sign, "sweep2.sign");

  check_range({c.sweep3.eps_min, c.sweep3.eps_max}, "sweep3.eps_max");
  check_count(c.sweep3.steps, 2, 1000000, "sweep3.steps");
  check_sign(c.sweep3.gamma0_sign, "sweep3.gamma0_sign");

  check_range(c.map2.gamma1, "map2.gamma1");
  check_range(c.map2.gamma2, "map2.gamma2");
  check_count(c.map2.resolution, 2, 4001, "map2.resolution");

  check_count(c.map3.fixed_axis, 0, 2, "map3.fixed_axis");
  check_range(c.map3.u, "map3.u");
  check_range(c.map3.v, "map3.v");
  check_count(c.map3.resolution, 2, 4001, "map3.resolution");
  check_sign(c.map3.gamma0_sign, "map3.gamma0_sign");

  const auto& p = c.ep.path;
  if (!is_dimer_path(p) && p != "antipt" && p != "eps1" && p != "eps2" && p != "eps3")
    throw ConfigError("ep.path", "must be pt, a-d, antipt, eps1, eps2 or eps3");
  check_range({c.ep.min, c.ep.max}, "ep.max");
  check_count(c.ep.grid, 3, 1000000, "ep.grid");
  check_sign(c.ep.sign, "ep.sign");
  if (c.ep.order && *c.ep.order != 2 && *c.ep.order != 3)
    throw ConfigError("ep.order", "must be 2 or 3");
}

Config parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"wells", "epsilons", "gammas", "coupling", "tolerance", "threads", "sweep2",
                  "sweep3", "map2", "map3", "ep"},
                 "");
  Config c;
  maybe(doc, "wells", [&](const json& v) { c.wells = get_int(v, "wells"); });
  maybe(doc, "epsilons", [&](const json& v) { c.epsilons = get_reals(v, "epsilons"); });
  maybe(doc, "gammas", [&](const json& v) { c.gammas = get_reals(v, "gammas"); });
  maybe(doc, "coupling", [&](const json& v) { c.coupling = get_real(v, "coupling"); });
  maybe(doc, "tolerance", [&](const json& v) { c.tolerance = get_real(v, "tolerance"); });
  maybe(doc, "threads", [&](const json& v) {
    const int t = get_int(v, "threads");
    check_count(t, 0, 1024, "threads");
    c.threads = static_cast<unsigned>(t);
  });

  maybe(doc, "sweep2", [&](const json& b) {
    reject_unknown(b, {"par", "gamma_min", "gamma_max", "steps", "sign"}, "sweep2");
    maybe(b, "par", [&](const json& v) { c.sweep2.par = get_string(v, "sweep2.par"); });
    maybe(b, "gamma_min", [&](const json& v) { c.sweep2.gamma_min = get_real(v, "sweep2.gamma_min"); });
    maybe(b, "gamma_max", [&](const json& v) { c.sweep2.gamma_max = get_real(v, "sweep2.gamma_max"); });
    maybe(b, "steps", [&](const json& v) { c.sweep2.steps = get_int(v, "sweep2.steps"); });
    maybe(b, "sign", [&](const json& v) { c.sweep2.sign = get_int(v, "sweep2.sign"); });
  });
  maybe(doc, "sweep3", [&](const json& b) {
    reject_unknown(b, {"eps_min", "eps_max", "steps", "gamma0_sign"}, "sweep3");
    maybe(b, "eps_min", [&](const json& v) { c.sweep3.eps_min = get_real(v, "sweep3.eps_min"); });
    maybe(b, "eps_max", [&](const json& v) { c.sweep3.eps_max = get_real(v, "sweep3.eps_max"); });
    maybe(b, "steps", [&](const json& v) { c.sweep3.steps = get_int(v, "sweep3.steps"); });
    maybe(b, "gamma0_sign",
          [&](const json& v) { c.sweep3.gamma0_sign = get_int(v, "sweep3.gamma0_sign"); });
  });
  maybe(doc, "map2", [&](const json& b) {
    reject_unknown(b, {"gamma1", "gamma2", "resolution"}, "map2");
    maybe(b, "gamma1", [&](const json& v) { c.map2.gamma1 = get_range(v, "map2.gamma1"); });
    maybe(b, "gamma2", [&](const json& v) { c.map2.gamma2 = get_range(v, "map2.gamma2"); });
    maybe(b, "resolution", [&](const json& v) { c.map2.resolution = get_int(v, "map2.resolution"); });
  });
  maybe(doc, "map3", [&](const json& b) {
    reject_unknown(b, {"fixed_axis", "fixed_value", "u", "v", "resolution", "gamma0_sign"}, "map3");
    maybe(b, "fixed_axis", [&](const json& v) { c.map3.fixed_axis = get_int(v, "map3.fixed_axis"); });
    maybe(b, "fixed_value", [&](const json& v) { c.map3.fixed_value = get_real(v, "map3.fixed_value"); });
    maybe(b, "u", [&](const json& v) { c.map3.u = get_range(v, "map3.u"); });
    maybe(b, "v", [&](const json& v) { c.map3.v = get_range(v, "map3.v"); });
    maybe(b, "resolution", [&](const json& v) { c.map3.resolution = get_int(v, "map3.resolution"); });
    maybe(b, "gamma0_sign",
          [&](const json& v) { c.map3.gamma0_sign = get_int(v, "map3.gamma0_sign"); });
  });
  maybe(doc, "ep", [&](const json& b) {
    reject_unknown(b, {"path", "min", "max", "grid", "sign", "order"}, "ep");
    maybe(b, "path", [&](const json& v) { c.ep.path = get_string(v, "ep.path"); });
    maybe(b, "min", [&](const json& v) { c.ep.min = get_real(v, "ep.min"); });
    maybe(b, "max", [&](const json& v) { c.ep.max = get_real(v, "ep.max"); });
    maybe(b, "grid", [&](const json& v) { c.ep.grid = get_int(v, "ep.grid"); });
    maybe(b, "sign", [&](const json& v) { c.ep.sign = get_int(v, "ep.sign"); });
    maybe(b, "order", [&](const json& v) { c.ep.order = get_int(v, "ep.order"); });
  });

  validate(c);
  return c;
}

}  // namespace symmwell::cli
