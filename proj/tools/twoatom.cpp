// twoatom: angular emission patterns of two driven two-level atoms.
//
// Exit codes: 0 success, 1 self-test failure, 2 configuration or usage
// error, 3 I/O error.

#include "twoatom/analysis_screen.hpp"
#include "twoatom/classical_dipole.hpp"
#include "twoatom/config.hpp"
#include "twoatom/io.hpp"
#include "twoatom/selftest.hpp"
#include "twoatom/steady_state.hpp"
#include "twoatom/trajectory_sim.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace twoatom;

namespace {

enum Exit { kOk = 0, kSelftestFailed = 1, kConfigError = 2, kIoError = 3 };

fs::path resolve(const fs::path& out_dir, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? p : out_dir / p;
}

void prepare_out_dir(const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  }
}

nlohmann::json grid_json(const AngularGrid& g) {
  return {{"n_theta", g.n_theta()}, {"n_phi", g.n_phi()}};
}

nlohmann::json scaling_json(const PgmScaling& s) { return {{"min", s.min}, {"max", s.max}}; }

void write_map_outputs(const AngularMap& map, const RunConfig& cfg, const fs::path& out_dir,
                       nlohmann::json metadata) {
  prepare_out_dir(out_dir);
  write_map_csv(map, resolve(out_dir, cfg.output.csv));
  const PgmScaling scaling = write_map_pgm(map, resolve(out_dir, cfg.output.pgm));
  metadata["map"] = {{"kind", to_string(map.kind)},
                     {"grid", grid_json(map.grid)},
                     {"csv", cfg.output.csv},
                     {"pgm", cfg.output.pgm},
                     {"pgm_scaling", scaling_json(scaling)}};
  write_json(metadata, resolve(out_dir, cfg.output.metadata));
}

int cmd_pattern(const RunConfig& cfg, const fs::path& out_dir) {
  const AngularGrid grid(cfg.grid.n_theta, cfg.grid.n_phi);
  const auto& exp = cfg.experiment;
  const AngularMap map = angular_map(
      [&](const Direction& k) { return steady_emission_density(exp, k); }, grid);
  write_map_outputs(map, cfg, out_dir,
                    {{"command", "pattern"},
                     {"config", config_to_json(cfg)},
                     {"fringe_visibility", steady_fringe_visibility(exp)},
                     {"total_rate", steady_total_rate(exp)}});
  std::cout << "pattern: wrote " << grid.n_theta() << "x" << grid.n_phi() << " map to "
            << out_dir.string() << "\n";
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir) {
  const auto& sim = cfg.simulation;
  const ClickStream stream = run(cfg.experiment, sim.duration, sim.dt, sim.seed);
  const AngularGrid grid(cfg.grid.n_theta, cfg.grid.n_phi);
  const AngularMap hist = accumulate_clicks(stream, grid, sim.burn_in);
  prepare_out_dir(out_dir);
  write_click_csv(stream, resolve(out_dir, cfg.output.clicks));
  const double retained = hist.values.sum();
  const double window = std::max(0.0, sim.duration - sim.burn_in);
  write_map_outputs(hist, cfg, out_dir,
                    {{"command", "simulate"},
                     {"config", config_to_json(cfg)},
                     {"stream", stream_metadata(stream)},
                     {"clicks_file", cfg.output.clicks},
                     {"burn_in", sim.burn_in},
                     {"retained_clicks", retained},
                     {"expected_clicks", steady_total_rate(cfg.experiment) * window}});
  std::cout << "simulate: " << stream.records.size() << " clicks (" << retained
            << " after burn-in), seed " << sim.seed << "\n";
  return kOk;
}

int cmd_classical(const RunConfig& cfg, const fs::path& out_dir) {
  const ClassicalConfig c = cfg.classical_or_matching();
  const AngularGrid grid(cfg.grid.n_theta, cfg.grid.n_phi);
  const AngularMap map = angular_map(
      [&](const Direction& k) { return classical_intensity(k, c); }, grid, MapKind::classical);
  const bool any_source = std::abs(c.e01) > 0.0 || std::abs(c.e02) > 0.0;
  write_map_outputs(map, cfg, out_dir,
                    {{"command", "classical"},
                     {"config", config_to_json(cfg)},
                     {"fringe_visibility",
                      any_source ? nlohmann::json(classical_visibility(c.e01, c.e02))
                                 : nlohmann::json(nullptr)}});
  std::cout << "classical: wrote " << grid.n_theta() << "x" << grid.n_phi() << " map to "
            << out_dir.string() << "\n";
  return kOk;
}

int cmd_visibility(const fs::path& map_path, std::optional<double> cut_theta,
                   std::optional<double> cut_phi) {
  const AngularMap map = read_map_csv(map_path);
  const CutSpec cut = cut_theta ? CutSpec::at_theta(*cut_theta, map.grid)
                                : CutSpec::at_phi(cut_phi.value_or(kPi / 2.0), map.grid);
  const bool along_theta = cut.axis == CutSpec::Axis::fixed_phi;
  const double fixed = along_theta ? map.grid.phi(cut.index) : map.grid.theta(cut.index);

  nlohmann::json line{{"map", map_path.string()},
                      {"kind", to_string(map.kind)},
                      {"cut", {{along_theta ? "phi" : "theta", fixed}}},
                      {"variable", along_theta ? "cos_theta" : "phi"}};
  const VisibilityReport v = visibility_along_cut(map, cut);
  if (v.status == FringeStatus::no_fringes) {
    line["status"] = "no_fringes";
    std::cout << line.dump() << "\n";
    std::cout << "no fringes along the cut (" << (along_theta ? "phi" : "theta") << " = "
              << format_double(fixed) << ")\n";
    return kOk;
  }
  line["status"] = "fringes";
  line["visibility"] = v.visibility;
  line["maxima"] = v.maxima;
  line["minima"] = v.minima;
  std::optional<FringeSpacing> spacing;
  try {
    spacing = fringe_spacing(map, cut);
  } catch (const std::runtime_error&) {
    // Fewer than three extrema: visibility is defined, spacing is not.
  }
  if (spacing) {
    line["spacing"] = spacing->mean;
    line["spacing_stddev"] = spacing->stddev;
    line["fringes"] = spacing->periods;
  } else {
    line["spacing"] = nullptr;
  }
  std::cout << line.dump() << "\n";
  std::cout << "visibility " << format_double(v.visibility) << " from " << v.maxima
            << " maxima and " << v.minima << " minima";
  if (spacing) {
    std::cout << "; spacing " << format_double(spacing->mean) << " +- "
              << format_double(spacing->stddev) << " in " << (along_theta ? "cos(theta)" : "phi")
              << ", " << format_double(spacing->periods) << " fringes across the cut";
  }
  std::cout << "\n";
  return kOk;
}

int cmd_selftest(const std::string& corrupt) {
  SelftestHooks hooks;
  if (corrupt == "closed-form") {
    hooks.corrupt_closed_form = true;
  } else if (corrupt == "envelope") {
    hooks.envelope_scale = 0.5;
  }
  const bool ok = print_selftest(run_selftest(hooks), std::cout);
  std::cout << (ok ? "selftest passed" : "selftest FAILED") << "\n";
  return ok ? kOk : kSelftestFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Angular emission patterns of two laser-driven two-level atoms"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";

  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "Output directory (created if missing)");
  };

  auto* pattern = app.add_subcommand("pattern", "Analytic steady-state emission map");
  add_run_options(pattern);
  auto* simulate = app.add_subcommand("simulate", "Quantum-jump click simulation");
  add_run_options(simulate);
  simulate->add_option("--seed", seed, "Overrides simulation.seed");
  auto* classical = app.add_subcommand("classical", "Classical two-dipole intensity map");
  add_run_options(classical);

  auto* visibility = app.add_subcommand("visibility", "Fringe visibility along a cut of a map CSV");
  std::string map_path;
  std::optional<double> cut_theta;
  std::optional<double> cut_phi;
  visibility->add_option("map", map_path, "Map CSV written by pattern/simulate/classical")->required();
  auto* theta_opt = visibility->add_option("--cut-theta", cut_theta, "Scan phi at this theta (rad)");
  auto* phi_opt =
      visibility->add_option("--cut-phi", cut_phi, "Scan theta at this phi (rad); default pi/2");
  theta_opt->excludes(phi_opt);

  auto* selftest = app.add_subcommand("selftest", "Run the invariant suites");
  std::string corrupt;
  selftest->add_option("--corrupt", corrupt)
      ->check(CLI::IsMember({"closed-form", "envelope"}))
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*selftest) {
      return cmd_selftest(corrupt);
    }
    if (*visibility) {
      return cmd_visibility(map_path, cut_theta, cut_phi);
    }
    RunConfig cfg = load_config(config_path);
    if (seed) {
      cfg.simulation.seed = *seed;
    }
    if (*pattern) {
      return cmd_pattern(cfg, out_dir);
    }
    if (*simulate) {
      return cmd_simulate(cfg, out_dir);
    }
    return cmd_classical(cfg, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const FormatError& e) {
    std::cerr << "error: " << map_path << ": " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid parameters: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}
