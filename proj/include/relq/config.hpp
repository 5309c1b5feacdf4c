#pragma once

#include <stdexcept>
#include <string>

#include "relq/model.hpp"
#include "relq/sde.hpp"

namespace relq {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One experiment instance loaded from an INI-style file with sections
// [dynamics], [cost], [robust], [solver]. Field names mirror the symbols:
// A B C D | L S R M N | rho alpha lambda family a1 a2 | x0 paths dt horizon
// seed threads kernel. family = single | two_point | uniform; single takes
// one value per field, two_point two values, uniform a polynomial
// coefficient list in ascending degree.
struct RunConfig {
  Problem problem;
  std::string family;   // "single" | "two_point" | "uniform"
  double lambda = 1.0;  // two-point mixing weight (validators)
  double x0 = 1.0;
  SimConfig sim;
  bool horizon_set = false;  // false: default T = ln(1e4)/rho at run time
};

// Parses the file; throws ConfigError with line/field context.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

// Deterministic run id: hash of (config text, command line, seed).
std::string run_id(const std::string& config_text, const std::string& command,
                   std::uint64_t seed);

}  // namespace relq
