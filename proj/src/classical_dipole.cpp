#include "twoatom/classical_dipole.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twoatom {

void ClassicalConfig::validate() const {
  if (!(prefactor > 0.0) || !std::isfinite(prefactor)) {
    throw std::invalid_argument("classical prefactor must be positive");
  }
  if (std::abs(d_hat.vector().norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("dipole orientation must be a unit vector");
  }
  if (!r1.allFinite() || !r2.allFinite()) {
    throw std::invalid_argument("source positions must be finite");
  }
}

ClassicalConfig ClassicalConfig::matching(const ExperimentConfig& cfg) {
  ClassicalConfig c;
  c.r1 = cfg.r1;
  c.r2 = cfg.r2;
  c.d_hat = cfg.d_hat;
  c.e01 = cfg.rabi1;
  c.e02 = cfg.rabi2;
  return c;
}

DipoleField field_at(const Vec3& r, double t, const ClassicalConfig& cfg) {
  cfg.validate();
  const Vec3 mid = 0.5 * (cfg.r1 + cfg.r2);
  const double dist1 = (r - cfg.r1).norm();
  const double dist2 = (r - cfg.r2).norm();
  if (dist1 == 0.0 || dist2 == 0.0 || (r - mid).norm() == 0.0) {
    throw std::invalid_argument("field point coincides with a source");
  }
  const Vec3 k = (r - mid).normalized();
  const Vec3 d = cfg.d_hat.vector();
  const Vec3 transverse = d - k.dot(d) * k;
  const double k0 = cfg.wavenumber();
  const double omega0 = k0;

  const cplx amp1 = cfg.e01 / dist1 * std::polar(1.0, -k0 * k.dot(r - cfg.r1));
  const cplx amp2 = cfg.e02 / dist2 * std::polar(1.0, -k0 * k.dot(r - cfg.r2));
  const cplx total = (amp1 + amp2) * std::polar(1.0, -omega0 * t);

  const double sep = cfg.separation().norm();
  const bool far = sep == 0.0 || std::min(dist1, dist2) >= kFarFieldRatio * sep;
  return DipoleField{transverse.cast<cplx>() * total, far};
}

double classical_intensity(const Direction& k_hat, const ClassicalConfig& cfg) {
  const double phase = cfg.wavenumber() * k_hat.vector().dot(cfg.separation());
  const double bracket = std::norm(cfg.e01) + std::norm(cfg.e02) +
                         2.0 * (std::conj(cfg.e01) * cfg.e02 * std::polar(1.0, -phase)).real();
  return std::max(0.0, cfg.prefactor * angular_factor(cfg.d_hat, k_hat) * bracket);
}

double classical_visibility(cplx e01, cplx e02) {
  const double a = std::abs(e01);
  const double b = std::abs(e02);
  if (a == 0.0 && b == 0.0) {
    throw std::invalid_argument("classical_visibility: both sources are off");
  }
  return 2.0 * a * b / (a * a + b * b);
}

}  // namespace twoatom
