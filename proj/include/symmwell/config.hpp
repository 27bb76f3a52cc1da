#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symmwell/model.hpp"

namespace symmwell::cli {

/// Invalid configuration. key() is the dotted path of the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

using Range = std::pair<double, double>;

struct Sweep2Config {
  std::string par = "b";
  double gamma_min = 0.0;
  double gamma_max = 1.0;
  int steps = 101;
  int sign = +1;
};

struct Sweep3Config {
  double eps_min = -1.2;
  double eps_max = 1.2;
  int steps = 241;
  int gamma0_sign = +1;
};

struct Map2Config {
  Range gamma1{-2.0, 2.0};
  Range gamma2{-2.0, 2.0};
  int resolution = 101;
};

struct Map3Config {
  int fixed_axis = 2;
  double fixed_value = 0.0;
  Range u{-1.5, 1.5};
  Range v{-1.5, 1.5};
  int resolution = 101;
  int gamma0_sign = +1;
};

/// path: "pt", a dimer parametrisation ("a".."d" or its long name),
/// "antipt", or "eps1"/"eps2"/"eps3" to move one on-site energy of the
/// configured three-well system.
struct EpConfig {
  std::string path = "pt";
  double min = 0.5;
  double max = 1.5;
  int grid = 512;
  int sign = +1;
  std::optional<int> order;
};

struct Config {
  std::optional<int> wells;
  std::vector<double> epsilons;
  std::vector<double> gammas;
  double coupling = 1.0;
  double tolerance = 1e-9;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;

  Sweep2Config sweep2;
  Sweep3Config sweep3;
  Map2Config map2;
  Map3Config map3;
  EpConfig ep;

  bool has_system() const { return !epsilons.empty() && !gammas.empty(); }
  /// Throws ConfigError when no complete system is configured.
  model::WellParameters system() const;
};

/// Parses and validates a JSON document. Unknown keys are rejected at every
/// level.
Config parse_config(std::string_view text);

/// Re-checks every field, e.g. after command-line overrides.
void validate(const Config& config);

}  // namespace symmwell::cli
