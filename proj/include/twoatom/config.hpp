#pragma once

// JSON run configuration for the command-line tool.
//
// {
//   "units": "lengths in wavelengths, rates in A",
//   "experiment": {
//     "separation": 20,              // atoms at +-(r/2) z; or "r1"/"r2": [x, y, z]
//     "dipole": [1, 0, 0],
//     "decay_rate": 1,
//     "rabi1": 0.3,                  // number, [re, im] or {"re": .., "im": ..}
//     "rabi2": [0.3, 0]
//   },
//   "classical": {"e01": 1, "e02": 1, "prefactor": 1},     // optional
//   "grid": {"n_theta": 128, "n_phi": 256},                  // optional
//   "simulation": {"duration": 1000, "dt": 0.01, "seed": 1, "burn_in": 20},
//   "output": {"csv": "map.csv", "pgm": "map.pgm",
//              "metadata": "metadata.json", "clicks": "clicks.csv"}
// }
//
// Everything except experiment.rabi1 and experiment.rabi2 has a default.
// Unknown keys are rejected. Output paths are relative to the --out
// directory unless absolute.

#include "twoatom/classical_dipole.hpp"
#include "twoatom/emission_law.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace twoatom {

/// Invalid configuration; the message names the offending field or line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  std::size_t n_theta = 128;
  std::size_t n_phi = 256;
};

struct SimulationSpec {
  double duration = 1000.0;
  double dt = 0.01;
  std::uint64_t seed = 1;
  double burn_in = 20.0;
};

struct OutputSpec {
  std::string csv = "map.csv";
  std::string pgm = "map.pgm";
  std::string metadata = "metadata.json";
  std::string clicks = "clicks.csv";
};

struct RunConfig {
  ExperimentConfig experiment;
  std::optional<ClassicalConfig> classical;  // defaults to ClassicalConfig::matching
  GridSpec grid;
  SimulationSpec simulation;
  OutputSpec output;

  ClassicalConfig classical_or_matching() const;
};

RunConfig parse_config(const nlohmann::json& doc);
/// Parse errors report the line number.
RunConfig parse_config_text(const std::string& text);
/// Throws IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// Canonical form: explicit positions and [re, im] pairs.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace twoatom
