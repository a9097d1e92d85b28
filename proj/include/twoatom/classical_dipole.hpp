#pragma once

// Classical reference: two coherent dipole sources of equal orientation.
// Lengths in wavelengths; the oscillation frequency follows from c = 1,
// so omega0 = k0 = 2 pi.

#include "twoatom/emission_law.hpp"

#include <Eigen/Dense>

namespace twoatom {

struct ClassicalConfig {
  Vec3 r1 = Vec3(0.0, 0.0, 10.0);
  Vec3 r2 = Vec3(0.0, 0.0, -10.0);
  Direction d_hat = Direction::x();
  cplx e01 = 1.0;
  cplx e02 = 1.0;
  /// Stands in for epsilon_0 c / 2.
  double prefactor = 1.0;

  double wavenumber() const { return kWavenumber; }
  Vec3 separation() const { return r1 - r2; }
  void validate() const;

  /// Same geometry as an ExperimentConfig, source strengths proportional to
  /// the Rabi frequencies.
  static ClassicalConfig matching(const ExperimentConfig& cfg);
};

/// Minimum ratio |R - r_i| / |r1 - r2| regarded as far field.
inline constexpr double kFarFieldRatio = 100.0;

struct DipoleField {
  Eigen::Vector3cd e;
  bool far_field;  // false when R is closer than kFarFieldRatio separations
};

/// Superposed field at R and time t. Each source uses its exact distance in
/// the 1/|R - r_i| amplitude and the common direction k (from the source
/// midpoint toward R) in the polarization and phase. Throws
/// std::invalid_argument when R coincides with a source.
DipoleField field_at(const Vec3& r, double t, const ClassicalConfig& cfg);

/// prefactor (1 - |d.k|^2) [|E01|^2 + |E02|^2 + 2 Re(conj(E01) E02 exp(-i k0 k.(r1 - r2)))]
double classical_intensity(const Direction& k_hat, const ClassicalConfig& cfg);

/// 2|E01||E02| / (|E01|^2 + |E02|^2). Throws std::invalid_argument when both vanish.
double classical_visibility(cplx e01, cplx e02);

}  // namespace twoatom
