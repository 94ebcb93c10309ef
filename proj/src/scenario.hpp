#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "io.hpp"

namespace varsob::scenario {

// Command-line overrides. Set values take precedence over the scenario's own fields.
struct RunOptions {
  std::optional<double> tol;
  std::optional<double> sigma;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string base_dir;  // relative space paths are resolved against it
};

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kDefaultSigma = 2.0;
inline constexpr double kDefaultEpsilon = 0.1;
inline constexpr std::uint64_t kDefaultSeed = 0;

RunOptions options_from_json(const io::Json& j);

struct RunResult {
  io::Json output;
  bool all_pass = true;  // every applicable report passed
};

// command: norm | gradient | verify | necessity. The input is one scenario or {"scenarios": [...]}.
// verify and necessity return a flat array of reports; norm and gradient return one object per scenario.
RunResult run(const std::string& command, const io::Json& input, const RunOptions& opts = {});

// {"kind": grid1d | grid2d | ball_grid_with_atom | cantor | two_zone_glued, ...parameters}.
MetricMeasureSpace generate_space(const io::Json& params);

}  // namespace varsob::scenario
