#include "twoatom/selftest.hpp"

#include "twoatom/analysis_screen.hpp"
#include "twoatom/classical_dipole.hpp"
#include "twoatom/emission_law.hpp"
#include "twoatom/io.hpp"
#include "twoatom/sphere_quadrature.hpp"
#include "twoatom/steady_state.hpp"
#include "twoatom/trajectory_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

namespace twoatom {

namespace {

// Outcome of a suite body: empty on success, otherwise the failing invariant.
using Check = std::function<std::string(std::string& summary)>;

PureState4 random_state(Rng& rng) {
  Eigen::Vector4cd a;
  for (Eigen::Index i = 0; i < 4; ++i) {
    // Box-Muller pairs give an isotropic vector in C^4.
    const double r = std::sqrt(-2.0 * std::log(1.0 - rng.uniform()));
    const double t = 2.0 * kPi * rng.uniform();
    a(i) = std::polar(r, t);
  }
  return PureState4(a).normalized();
}

Direction random_direction(Rng& rng) {
  const double u = 2.0 * rng.uniform() - 1.0;
  return Direction::from_angles(std::acos(u), 2.0 * kPi * rng.uniform());
}

std::string suite_pure_mixed(std::string& summary) {
  Rng rng(11);
  const auto cfg = ExperimentConfig::on_z_axis(3.7, 0.0, 0.0);
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    const PureState4 psi = random_state(rng);
    const Direction k = random_direction(rng);
    const double pure = emission_density_pure(psi, k, cfg);
    const double mixed = emission_density_mixed(dm_from_pure(psi), k, cfg);
    worst = std::max(worst, std::abs(pure - mixed) / std::max(pure, 1e-300));
  }
  summary = "max relative difference " + format_double(worst);
  return worst <= 1e-12 ? "" : "mixed-state density differs from the pure-state density";
}

std::string suite_sphere_integrals(std::string& summary) {
  const SphereQuadrature quad(64, 128);
  auto cfg = ExperimentConfig::on_z_axis(2.0, 0.0, 0.0);
  const double dipole = quad.integrate([&](double u, double phi) {
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    return dipole_prefactor(Direction::from_vector(Vec3(s * std::cos(phi), s * std::sin(phi), u)), cfg);
  });
  if (std::abs(dipole - 1.0) > 1e-10) {
    return "dipole factor does not integrate to 1 (got " + format_double(dipole) + ")";
  }
  Rng rng(12);
  const cplx gamma = cross_term_gamma(cfg, quad);
  double worst = 0.0;
  for (int n = 0; n < 5; ++n) {
    const PureState4 psi = random_state(rng);
    const double integral = quad.integrate([&](double u, double phi) {
      const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
      return emission_density_pure(
          psi, Direction::from_vector(Vec3(s * std::cos(phi), s * std::sin(phi), u)), cfg);
    });
    const PureState4 s1 = apply_lowering(psi, Atom::first);
    const PureState4 s2 = apply_lowering(psi, Atom::second);
    const double expected = total_emission_rate(psi, cfg) + 2.0 * (inner(s1, s2) * gamma).real();
    worst = std::max(worst, std::abs(integral - expected));
  }
  summary = "max rate-identity error " + format_double(worst);
  return worst <= 1e-8 ? "" : "sphere integral of the density misses the rate identity";
}

std::string suite_fixed_point(std::string& summary, bool corrupt) {
  SingleAtomSteadyFn factor = single_atom_steady;
  if (corrupt) {
    // Population with A^2 + |Omega|^2 in the denominator: the classic slip.
    factor = [](cplx rabi, double a) {
      const double w2 = std::norm(rabi);
      const double d = a * a + w2;
      Eigen::Matrix2cd m;
      m(1, 1) = w2 / d;
      m(0, 0) = a * a / d;
      m(0, 1) = cplx(0.0, 1.0) * rabi * a / d;
      m(1, 0) = std::conj(m(0, 1));
      return SingleAtomDensity(m);
    };
  }
  const cplx drives[][2] = {{0.1, 0.1}, {0.3, 0.3}, {1.0, 1.0}, {0.3, cplx(0.2, -0.5)}};
  double worst = 0.0;
  for (const auto& d : drives) {
    const auto cfg = ExperimentConfig::on_z_axis(20.0, d[0], d[1]);
    worst = std::max(worst, two_atom_steady(cfg, factor).residual);
  }
  summary = "max master-equation residual " + format_double(worst);
  return worst <= 1e-12 ? "" : "closed-form product is not a fixed point of the master equation";
}

std::string suite_sampler_bound(std::string& summary, double envelope_scale) {
  Rng rng(13);
  const auto cfg = ExperimentConfig::on_z_axis(1.3, 0.0, 0.0);
  for (int n = 0; n < 40; ++n) {
    const PureState4 psi = random_state(rng);
    const double bound = envelope_scale * direction_density_bound(psi, cfg);
    for (int m = 0; m < 500; ++m) {
      const double f = emission_density_pure(psi, random_direction(rng), cfg);
      if (f > bound * (1.0 + 1e-12)) {
        return "emission density exceeds the rejection envelope";
      }
    }
  }
  // Distribution check of cos(theta) for |22> against the exact marginal.
  const PureState4 psi = PureState4::basis(Level::excited, Level::excited);
  constexpr int kBins = 16;
  constexpr int kSamples = 20000;
  std::vector<double> counts(kBins, 0.0);
  for (int n = 0; n < kSamples; ++n) {
    const double u = sample_direction(psi, cfg, rng, envelope_scale).vector().z();
    counts[std::min(kBins - 1, static_cast<int>((u + 1.0) * 0.5 * kBins))] += 1.0;
  }
  // For |22> with d = x the density is (3A/4pi)(1 - sin^2 theta cos^2 phi);
  // integrated over phi the cos(theta) marginal is proportional to 1 + u^2.
  double chi2 = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double lo = -1.0 + 2.0 * b / kBins;
    const double hi = lo + 2.0 / kBins;
    const double p = ((hi - lo) + (hi * hi * hi - lo * lo * lo) / 3.0) / (8.0 / 3.0);
    const double e = p * kSamples;
    chi2 += (counts[static_cast<std::size_t>(b)] - e) * (counts[static_cast<std::size_t>(b)] - e) / e;
  }
  summary = "chi2 = " + format_double(chi2) + " for 15 dof";
  // 15 degrees of freedom: chi2 > 50 has probability below 1e-5.
  return chi2 <= 50.0 ? "" : "sampled directions do not follow the emission density";
}

std::string suite_determinism(std::string& summary) {
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.3, 0.3);
  const ClickStream a = run(cfg, 200.0, kDefaultStep, 99);
  const ClickStream b = run(cfg, 200.0, kDefaultStep, 99);
  const ClickStream c = run(cfg, 200.0, kDefaultStep, 100);
  const auto same = [](const ClickStream& x, const ClickStream& y) {
    if (x.records.size() != y.records.size()) {
      return false;
    }
    for (std::size_t i = 0; i < x.records.size(); ++i) {
      if (x.records[i].t != y.records[i].t ||
          x.records[i].direction.vector() != y.records[i].direction.vector()) {
        return false;
      }
    }
    return true;
  };
  summary = std::to_string(a.records.size()) + " clicks reproduced";
  if (!same(a, b)) {
    return "same seed produced different click streams";
  }
  return same(a, c) ? "different seeds produced identical click streams" : "";
}

std::string suite_click_rate(std::string& summary) {
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.3, 0.3);
  const double burn_in = 20.0;
  const double duration = 20000.0;
  const ClickStream s = run(cfg, duration, kDefaultStep, 7);
  const auto n = static_cast<double>(std::count_if(
      s.records.begin(), s.records.end(), [&](const ClickRecord& r) { return r.t >= burn_in; }));
  const double expected = steady_total_rate(cfg) * (duration - burn_in);
  const double z = (n - expected) / std::sqrt(expected);
  summary = "clicks " + format_double(n) + ", expected " + format_double(expected) + ", z = " +
            format_double(z);
  return std::abs(z) <= 4.0 ? "" : "click count is inconsistent with the steady-state rate";
}

std::string suite_fringe_calibration(std::string& summary) {
  CutProfile p;
  p.span = 2.0;
  const double a = 2.0;
  const double b = 1.3;
  const double spacing = 0.05;
  for (int i = 0; i < 400; ++i) {
    const double x = -1.0 + (i + 0.5) * 2.0 / 400.0;
    p.x.push_back(x);
    p.y.push_back(a + b * std::cos(2.0 * kPi * x / spacing + 0.3));
  }
  const VisibilityReport v = visibility_of_profile(p);
  if (v.status != FringeStatus::fringes || std::abs(v.visibility - b / a) > 1e-9) {
    return "visibility of a synthetic cosine is not b/a";
  }
  const FringeSpacing s = fringe_spacing_of_profile(p);
  summary = "V = " + format_double(v.visibility) + ", spacing " + format_double(s.mean);
  return std::abs(s.mean - spacing) <= 0.01 * spacing ? "" : "planted fringe spacing not recovered";
}

std::string suite_classical(std::string& summary) {
  ClassicalConfig c;
  c.r1 = Vec3(0.0, 0.0, 2.5);
  c.r2 = Vec3(0.0, 0.0, -2.5);
  const AngularGrid grid(64, 32);
  const AngularMap map = angular_map(
      [&](const Direction& k) { return classical_intensity(k, c); }, grid, MapKind::classical);
  const VisibilityReport v = visibility_along_cut(map, CutSpec::at_phi(kPi / 2.0, grid));
  summary = "V = " + format_double(v.visibility);
  if (v.status != FringeStatus::fringes) {
    return "equal classical sources show no fringes";
  }
  return std::abs(v.visibility - 1.0) <= 1e-6 ? "" : "equal classical sources do not give V = 1";
}

SuiteResult guarded(const std::string& name, const Check& body) {
  std::string summary;
  try {
    const std::string failure = body(summary);
    if (failure.empty()) {
      return {name, true, summary};
    }
    return {name, false, summary.empty() ? failure : failure + " (" + summary + ")"};
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestHooks& hooks) {
  std::vector<SuiteResult> out;
  out.push_back(guarded("pure_mixed_equivalence", suite_pure_mixed));
  out.push_back(guarded("sphere_integrals", suite_sphere_integrals));
  out.push_back(guarded("steady_fixed_point", [&](std::string& s) {
    return suite_fixed_point(s, hooks.corrupt_closed_form);
  }));
  out.push_back(guarded("sampler_bound", [&](std::string& s) {
    return suite_sampler_bound(s, hooks.envelope_scale);
  }));
  out.push_back(guarded("trajectory_determinism", suite_determinism));
  out.push_back(guarded("click_rate", suite_click_rate));
  out.push_back(guarded("fringe_calibration", suite_fringe_calibration));
  out.push_back(guarded("classical_visibility", suite_classical));
  return out;
}

bool print_selftest(const std::vector<SuiteResult>& results, std::ostream& out) {
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all;
}

}  // namespace twoatom
