#pragma once

// File formats:
//
//   AngularMap CSV    "# angular_map kind=<kind> n_theta=<n> n_phi=<m>" line,
//                     then "theta,phi,value" header and one row per cell
//                     (theta-major).
//   AngularMap PGM    binary P5, rows = theta, columns = phi, min-max scaled
//                     to 0..255; scaling in a JSON sidecar.
//   ClickStream CSV   "t,theta,phi" header, one row per click; seed, dt,
//                     duration and configuration in a JSON sidecar.

#include "twoatom/analysis_screen.hpp"
#include "twoatom/trajectory_sim.hpp"

#include "json.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace twoatom {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file content (as opposed to a failed read or write).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_map_csv(const AngularMap& map, const std::filesystem::path& path);
AngularMap read_map_csv(const std::filesystem::path& path);

struct PgmScaling {
  double min;
  double max;
};

/// Writes the image and returns the value range mapped onto 0..255.
PgmScaling write_map_pgm(const AngularMap& map, const std::filesystem::path& path);

void write_click_csv(const ClickStream& stream, const std::filesystem::path& path);

nlohmann::json experiment_to_json(const ExperimentConfig& cfg);
nlohmann::json stream_metadata(const ClickStream& stream);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace twoatom
