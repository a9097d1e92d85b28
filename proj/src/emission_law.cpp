#include "twoatom/emission_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twoatom {

namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr double kClampTolerance = 1e-12;
// Below this fraction of the largest possible amplitude the click is treated
// as impossible (exact destructive interference leaves ~1e-32 residue).
constexpr double kNoEmissionFraction = 1e-20;

double three_over_eight_pi(double decay_rate) { return 3.0 * decay_rate / (8.0 * kPi); }

void require_normalized(const PureState4& psi, const char* where) {
  if (!psi.is_normalized()) {
    throw InvariantError(std::string(where) + ": state must be normalized (|norm^2 - 1| <= 1e-9)");
  }
}

double clamp_density(double value) {
  if (value < -kClampTolerance) {
    throw std::logic_error("emission density is negative beyond rounding");
  }
  return value < 0.0 ? 0.0 : value;
}

}  // namespace

Direction Direction::from_vector(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("Direction: zero or non-finite vector");
  }
  if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    return Direction(v);
  }
  return Direction(Vec3(v / n));
}

Direction Direction::from_angles(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw std::invalid_argument("Direction: non-finite angle");
  }
  const double s = std::sin(theta);
  return Direction(Vec3(s * std::cos(phi), s * std::sin(phi), std::cos(theta)));
}

double Direction::theta() const { return std::acos(std::clamp(v_.z(), -1.0, 1.0)); }

double Direction::phi() const {
  double p = std::atan2(v_.y(), v_.x());
  if (p < 0.0) {
    p += 2.0 * kPi;
  }
  return p >= 2.0 * kPi ? 0.0 : p;
}

void ExperimentConfig::validate() const {
  if (!(decay_rate > 0.0) || !std::isfinite(decay_rate)) {
    throw std::invalid_argument("decay rate A must be positive and finite");
  }
  if (!r1.allFinite() || !r2.allFinite()) {
    throw std::invalid_argument("atom positions must be finite");
  }
  if (std::abs(d_hat.vector().norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("dipole orientation must be a unit vector");
  }
  if (!std::isfinite(std::abs(rabi1)) || !std::isfinite(std::abs(rabi2))) {
    throw std::invalid_argument("Rabi frequencies must be finite");
  }
}

ExperimentConfig ExperimentConfig::on_z_axis(double separation, cplx rabi1, cplx rabi2,
                                             double decay_rate) {
  ExperimentConfig cfg;
  cfg.r1 = Vec3(0.0, 0.0, 0.5 * separation);
  cfg.r2 = Vec3(0.0, 0.0, -0.5 * separation);
  cfg.d_hat = Direction::x();
  cfg.decay_rate = decay_rate;
  cfg.rabi1 = rabi1;
  cfg.rabi2 = rabi2;
  cfg.validate();
  return cfg;
}

double angular_factor(const Direction& d_hat, const Direction& k_hat) {
  const double c = d_hat.vector().dot(k_hat.vector());
  return std::max(0.0, 1.0 - c * c);
}

double dipole_prefactor(const Direction& k_hat, const ExperimentConfig& cfg) {
  return three_over_eight_pi(cfg.decay_rate) * angular_factor(cfg.d_hat, k_hat);
}

double relative_phase(const Direction& k_hat, const ExperimentConfig& cfg) {
  return cfg.wavenumber() * k_hat.vector().dot(cfg.separation());
}

PureState4 emitted_amplitude(const PureState4& psi, const Direction& k_hat,
                             const ExperimentConfig& cfg) {
  const double k0 = cfg.wavenumber();
  const cplx p1 = std::polar(1.0, -k0 * k_hat.vector().dot(cfg.r1));
  const cplx p2 = std::polar(1.0, -k0 * k_hat.vector().dot(cfg.r2));
  return p1 * apply_lowering(psi, Atom::first) + p2 * apply_lowering(psi, Atom::second);
}

double emission_density_pure(const PureState4& psi, const Direction& k_hat,
                             const ExperimentConfig& cfg) {
  require_normalized(psi, "emission_density_pure");
  return dipole_prefactor(k_hat, cfg) * emitted_amplitude(psi, k_hat, cfg).norm_squared();
}

ResetOutcome reset_state(const PureState4& psi, const Direction& k_hat,
                         const ExperimentConfig& cfg) {
  require_normalized(psi, "reset_state");
  const double pref = dipole_prefactor(k_hat, cfg);
  const PureState4 amp = emitted_amplitude(psi, k_hat, cfg);
  const double n1 = std::sqrt(apply_lowering(psi, Atom::first).norm_squared());
  const double n2 = std::sqrt(apply_lowering(psi, Atom::second).norm_squared());
  const double bound = (n1 + n2) * (n1 + n2);
  const double amp2 = amp.norm_squared();
  if (pref <= 0.0 || bound <= 0.0 || amp2 <= kNoEmissionFraction * bound) {
    return NoEmission{};
  }
  return ResetState{amp.normalized(), pref * amp2};
}

double total_emission_rate(const PureState4& psi, const ExperimentConfig& cfg) {
  require_normalized(psi, "total_emission_rate");
  return cfg.decay_rate * (apply_lowering(psi, Atom::first).norm_squared() +
                           apply_lowering(psi, Atom::second).norm_squared());
}

cplx cross_term_gamma(const ExperimentConfig& cfg, const SphereQuadrature& quadrature) {
  const Vec3 sep = cfg.separation();
  const Vec3 d = cfg.d_hat.vector();
  const double k0 = cfg.wavenumber();
  const cplx integral = quadrature.integrate([&](double ct, double phi) {
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const Vec3 k(st * std::cos(phi), st * std::sin(phi), ct);
    const double c = d.dot(k);
    return (1.0 - c * c) * std::polar(1.0, -k0 * k.dot(sep));
  });
  return three_over_eight_pi(cfg.decay_rate) * integral;
}

double emission_density_mixed(const DensityMatrix4& rho, const Direction& k_hat,
                              const ExperimentConfig& cfg) {
  const double populations =
      2.0 * rho(k22, k22).real() + rho(k12, k12).real() + rho(k21, k21).real();
  // <21|rho|12> carries the coherence that the click amplitude in
  // emission_density_pure produces; see the README's conventions section.
  const cplx phase = std::polar(1.0, -relative_phase(k_hat, cfg));
  const double interference = 2.0 * (rho(k21, k12) * phase).real();
  return clamp_density(dipole_prefactor(k_hat, cfg) * (populations + interference));
}

double overlap_which_way(const PureState4& psi) {
  const PureState4 s1 = apply_lowering(psi, Atom::first);
  const PureState4 s2 = apply_lowering(psi, Atom::second);
  const double n1 = std::sqrt(s1.norm_squared());
  const double n2 = std::sqrt(s2.norm_squared());
  if (n1 == 0.0 && n2 == 0.0) {
    throw NoEmissionError("overlap_which_way: state has no excited population");
  }
  if (n1 == 0.0 || n2 == 0.0) {
    return 0.0;
  }
  return std::min(1.0, std::abs(inner(s1, s2)) / (n1 * n2));
}

}  // namespace twoatom
