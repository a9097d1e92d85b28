#include "twoatom/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace twoatom {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

double parse_double(const std::string& text, std::size_t line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first != last && *first == ' ') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("line " + std::to_string(line) + ": '" + text + "' is not a number");
  }
  return v;
}

nlohmann::json complex_to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json vec_to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_map_csv(const AngularMap& map, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "# angular_map kind=" << to_string(map.kind) << " n_theta=" << map.grid.n_theta()
      << " n_phi=" << map.grid.n_phi() << "\n";
  out << "theta,phi,value\n";
  for (std::size_t i = 0; i < map.grid.n_theta(); ++i) {
    for (std::size_t j = 0; j < map.grid.n_phi(); ++j) {
      out << format_double(map.grid.theta(i)) << ',' << format_double(map.grid.phi(j)) << ','
          << format_double(map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
          << '\n';
    }
  }
  finish(out, path);
}

AngularMap read_map_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("# angular_map", 0) != 0) {
    throw FormatError("line 1: missing '# angular_map' grid header");
  }
  std::string kind_name;
  std::size_t n_theta = 0;
  std::size_t n_phi = 0;
  {
    std::istringstream hs(line.substr(std::string("# angular_map").size()));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw FormatError("line 1: malformed header token '" + tok + "'");
      }
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "kind") {
        kind_name = val;
      } else if (key == "n_theta") {
        n_theta = static_cast<std::size_t>(std::stoul(val));
      } else if (key == "n_phi") {
        n_phi = static_cast<std::size_t>(std::stoul(val));
      }
    }
  }
  if (n_theta == 0 || n_phi == 0 || kind_name.empty()) {
    throw FormatError("line 1: header must give kind, n_theta and n_phi");
  }
  MapKind kind;
  try {
    kind = map_kind_from_string(kind_name);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("line 1: ") + e.what());
  }
  if (!std::getline(in, line) || line != "theta,phi,value") {
    throw FormatError("line 2: expected 'theta,phi,value'");
  }
  AngularGrid grid(n_theta, n_phi);
  AngularMap map{grid, Eigen::MatrixXd::Zero(n_theta, n_phi), kind};
  std::size_t row = 0;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (row >= n_theta * n_phi) {
      throw FormatError("line " + std::to_string(line_no) + ": more rows than the grid holds");
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": expected three columns");
    }
    const double theta = parse_double(line.substr(0, c1), line_no);
    const double phi = parse_double(line.substr(c1 + 1, c2 - c1 - 1), line_no);
    const double value = parse_double(line.substr(c2 + 1), line_no);
    const std::size_t i = row / n_phi;
    const std::size_t j = row % n_phi;
    if (std::abs(theta - grid.theta(i)) > 1e-9 || std::abs(phi - grid.phi(j)) > 1e-9) {
      throw FormatError("line " + std::to_string(line_no) + ": cell centre does not match the grid");
    }
    map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
    ++row;
  }
  if (row != n_theta * n_phi) {
    throw FormatError("expected " + std::to_string(n_theta * n_phi) + " rows, found " +
                      std::to_string(row));
  }
  return map;
}

PgmScaling write_map_pgm(const AngularMap& map, const std::filesystem::path& path) {
  const double lo = map.values.minCoeff();
  const double hi = map.values.maxCoeff();
  const double range = hi - lo;
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "P5\n" << map.grid.n_phi() << ' ' << map.grid.n_theta() << "\n255\n";
  std::string row(map.grid.n_phi(), '\0');
  for (std::size_t i = 0; i < map.grid.n_theta(); ++i) {
    for (std::size_t j = 0; j < map.grid.n_phi(); ++j) {
      const double v = map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double scaled = range > 0.0 ? (v - lo) / range : 0.0;
      row[j] = static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(scaled, 0.0, 1.0) * 255.0)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  finish(out, path);
  return PgmScaling{lo, hi};
}

void write_click_csv(const ClickStream& stream, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,theta,phi\n";
  for (const auto& rec : stream.records) {
    out << format_double(rec.t) << ',' << format_double(rec.direction.theta()) << ','
        << format_double(rec.direction.phi()) << '\n';
  }
  finish(out, path);
}

nlohmann::json experiment_to_json(const ExperimentConfig& cfg) {
  return nlohmann::json{{"r1", vec_to_json(cfg.r1)},
                        {"r2", vec_to_json(cfg.r2)},
                        {"dipole", vec_to_json(cfg.d_hat.vector())},
                        {"decay_rate", cfg.decay_rate},
                        {"rabi1", complex_to_json(cfg.rabi1)},
                        {"rabi2", complex_to_json(cfg.rabi2)}};
}

nlohmann::json stream_metadata(const ClickStream& stream) {
  return nlohmann::json{{"units", "lengths in wavelengths, rates in A, times in 1/A"},
                        {"seed", stream.seed},
                        {"dt", stream.dt},
                        {"duration", stream.duration},
                        {"clicks", stream.records.size()},
                        {"experiment", experiment_to_json(stream.cfg)}};
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

}  // namespace twoatom
