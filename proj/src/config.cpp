#include "twoatom/config.hpp"

#include "twoatom/io.hpp"
#include "twoatom/trajectory_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace twoatom {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

const json* member(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& object_at(const json& obj, const char* key, const std::string& where) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    fail(where, "missing");
  }
  if (!v->is_object()) {
    fail(where, "expected an object");
  }
  return *v;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) {
    fail(field, "expected a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    fail(field, "must be finite");
  }
  return x;
}

double number_or(const json& obj, const char* key, const std::string& where, double fallback) {
  const json* v = member(obj, key);
  return v == nullptr ? fallback : number(*v, where + "." + key);
}

double positive_or(const json& obj, const char* key, const std::string& where, double fallback) {
  const double x = number_or(obj, key, where, fallback);
  if (!(x > 0.0)) {
    fail(where + "." + key, "must be positive");
  }
  return x;
}

std::size_t count_or(const json& obj, const char* key, const std::string& where,
                     std::size_t fallback) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    return fallback;
  }
  if (!v->is_number_integer() || v->get<long long>() < 1) {
    fail(where + "." + key, "expected a positive integer");
  }
  return v->get<std::size_t>();
}

cplx complex_value(const json& v, const std::string& field) {
  if (v.is_number()) {
    return {number(v, field), 0.0};
  }
  if (v.is_array()) {
    if (v.size() != 2) {
      fail(field, "expected [re, im]");
    }
    return {number(v[0], field + "[0]"), number(v[1], field + "[1]")};
  }
  if (v.is_object()) {
    reject_unknown(v, field, {"re", "im"});
    return {number_or(v, "re", field, 0.0), number_or(v, "im", field, 0.0)};
  }
  fail(field, "expected a number, [re, im] or {\"re\", \"im\"}");
}

cplx complex_at(const json& obj, const char* key, const std::string& where) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    fail(where + "." + key, "missing");
  }
  return complex_value(*v, where + "." + key);
}

Vec3 vector_value(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) {
    fail(field, "expected [x, y, z]");
  }
  return {number(v[0], field + "[0]"), number(v[1], field + "[1]"), number(v[2], field + "[2]")};
}

std::string string_or(const json& obj, const char* key, const std::string& where,
                      const std::string& fallback) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    return fallback;
  }
  if (!v->is_string() || v->get<std::string>().empty()) {
    fail(where + "." + key, "expected a non-empty string");
  }
  return v->get<std::string>();
}

ExperimentConfig parse_experiment(const json& e) {
  const std::string w = "experiment";
  reject_unknown(e, w, {"separation", "r1", "r2", "dipole", "decay_rate", "rabi1", "rabi2"});
  ExperimentConfig cfg;
  const json* sep = member(e, "separation");
  const json* r1 = member(e, "r1");
  const json* r2 = member(e, "r2");
  if (sep != nullptr && (r1 != nullptr || r2 != nullptr)) {
    fail(w + ".separation", "give either separation or r1/r2, not both");
  }
  if ((r1 == nullptr) != (r2 == nullptr)) {
    fail(w + (r1 == nullptr ? ".r1" : ".r2"), "missing (r1 and r2 come together)");
  }
  if (sep != nullptr) {
    const double r = number(*sep, w + ".separation");
    if (r < 0.0) {
      fail(w + ".separation", "must be non-negative");
    }
    cfg.r1 = Vec3(0.0, 0.0, 0.5 * r);
    cfg.r2 = Vec3(0.0, 0.0, -0.5 * r);
  } else if (r1 != nullptr) {
    cfg.r1 = vector_value(*r1, w + ".r1");
    cfg.r2 = vector_value(*r2, w + ".r2");
  }
  if (const json* d = member(e, "dipole")) {
    const Vec3 v = vector_value(*d, w + ".dipole");
    if (v.norm() == 0.0) {
      fail(w + ".dipole", "must be non-zero");
    }
    cfg.d_hat = Direction::from_vector(v);
  }
  cfg.decay_rate = positive_or(e, "decay_rate", w, 1.0);
  cfg.rabi1 = complex_at(e, "rabi1", w);
  cfg.rabi2 = complex_at(e, "rabi2", w);
  return cfg;
}

ClassicalConfig parse_classical(const json& c, const ExperimentConfig& exp) {
  const std::string w = "classical";
  reject_unknown(c, w, {"e01", "e02", "prefactor"});
  ClassicalConfig cfg = ClassicalConfig::matching(exp);
  if (member(c, "e01") != nullptr) {
    cfg.e01 = complex_at(c, "e01", w);
  }
  if (member(c, "e02") != nullptr) {
    cfg.e02 = complex_at(c, "e02", w);
  }
  cfg.prefactor = positive_or(c, "prefactor", w, 1.0);
  return cfg;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }
json vector_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

ClassicalConfig RunConfig::classical_or_matching() const {
  return classical ? *classical : ClassicalConfig::matching(experiment);
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  reject_unknown(doc, "", {"units", "experiment", "classical", "grid", "simulation", "output"});
  RunConfig cfg;
  cfg.experiment = parse_experiment(object_at(doc, "experiment", "experiment"));
  if (member(doc, "classical") != nullptr) {
    cfg.classical = parse_classical(object_at(doc, "classical", "classical"), cfg.experiment);
  }
  if (member(doc, "grid") != nullptr) {
    const json& g = object_at(doc, "grid", "grid");
    reject_unknown(g, "grid", {"n_theta", "n_phi"});
    cfg.grid.n_theta = count_or(g, "n_theta", "grid", cfg.grid.n_theta);
    cfg.grid.n_phi = count_or(g, "n_phi", "grid", cfg.grid.n_phi);
  }
  if (member(doc, "simulation") != nullptr) {
    const json& s = object_at(doc, "simulation", "simulation");
    const std::string w = "simulation";
    reject_unknown(s, w, {"duration", "dt", "seed", "burn_in"});
    cfg.simulation.duration = number_or(s, "duration", w, cfg.simulation.duration);
    if (!(cfg.simulation.duration > 0.0)) {
      fail(w + ".duration", "must be positive");
    }
    cfg.simulation.dt = positive_or(s, "dt", w, cfg.simulation.dt);
    if (cfg.simulation.dt * cfg.experiment.decay_rate > kMaxDecayStep) {
      fail(w + ".dt", "A * dt must not exceed " + format_double(kMaxDecayStep));
    }
    cfg.simulation.burn_in = number_or(s, "burn_in", w, cfg.simulation.burn_in);
    if (cfg.simulation.burn_in < 0.0) {
      fail(w + ".burn_in", "must be non-negative");
    }
    if (const json* seed = member(s, "seed")) {
      if (!seed->is_number_unsigned()) {
        fail(w + ".seed", "expected a non-negative integer");
      }
      cfg.simulation.seed = seed->get<std::uint64_t>();
    }
  }
  if (member(doc, "output") != nullptr) {
    const json& o = object_at(doc, "output", "output");
    reject_unknown(o, "output", {"csv", "pgm", "metadata", "clicks"});
    cfg.output.csv = string_or(o, "csv", "output", cfg.output.csv);
    cfg.output.pgm = string_or(o, "pgm", "output", cfg.output.pgm);
    cfg.output.metadata = string_or(o, "metadata", "output", cfg.output.metadata);
    cfg.output.clicks = string_or(o, "clicks", "output", cfg.output.clicks);
  }
  try {
    cfg.experiment.validate();
    if (cfg.classical) {
      cfg.classical->validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, false);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError("config line " + std::to_string(line) + ": malformed JSON");
  }
  return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read config '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json config_to_json(const RunConfig& cfg) {
  const auto& e = cfg.experiment;
  json doc;
  doc["units"] = "lengths in wavelengths, rates in A";
  doc["experiment"] = {{"r1", vector_json(e.r1)},
                       {"r2", vector_json(e.r2)},
                       {"dipole", vector_json(e.d_hat.vector())},
                       {"decay_rate", e.decay_rate},
                       {"rabi1", complex_json(e.rabi1)},
                       {"rabi2", complex_json(e.rabi2)}};
  if (cfg.classical) {
    doc["classical"] = {{"e01", complex_json(cfg.classical->e01)},
                        {"e02", complex_json(cfg.classical->e02)},
                        {"prefactor", cfg.classical->prefactor}};
  }
  doc["grid"] = {{"n_theta", cfg.grid.n_theta}, {"n_phi", cfg.grid.n_phi}};
  doc["simulation"] = {{"duration", cfg.simulation.duration},
                       {"dt", cfg.simulation.dt},
                       {"seed", cfg.simulation.seed},
                       {"burn_in", cfg.simulation.burn_in}};
  doc["output"] = {{"csv", cfg.output.csv},
                   {"pgm", cfg.output.pgm},
                   {"metadata", cfg.output.metadata},
                   {"clicks", cfg.output.clicks}};
  return doc;
}

}  // namespace twoatom
