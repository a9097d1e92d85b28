#pragma once

// Angular emission law of two laser-driven two-level atoms.
//
// Natural units: the single-atom decay rate sets the rate scale (A = 1 by
// default) and the transition wavelength sets the length scale, so the
// photon wavenumber is k0 = 2 pi. Positions are in wavelengths.

#include "twoatom/quantum_core.hpp"
#include "twoatom/sphere_quadrature.hpp"

#include <stdexcept>
#include <variant>

namespace twoatom {

inline constexpr double kWavenumber = 2.0 * kPi;

/// Unit vector. Also used for the dipole orientation.
class Direction {
 public:
  /// Normalizes v; rejects zero or non-finite vectors.
  static Direction from_vector(const Vec3& v);
  /// theta in [0, pi] from +z, phi azimuth from +x.
  static Direction from_angles(double theta, double phi);

  static Direction x() { return Direction(Vec3::UnitX()); }
  static Direction y() { return Direction(Vec3::UnitY()); }
  static Direction z() { return Direction(Vec3::UnitZ()); }

  const Vec3& vector() const { return v_; }
  double theta() const;
  /// Azimuth in [0, 2 pi).
  double phi() const;

  Direction operator-() const { return Direction(Vec3(-v_)); }

 private:
  explicit Direction(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

struct ExperimentConfig {
  Vec3 r1 = Vec3(0.0, 0.0, 10.0);
  Vec3 r2 = Vec3(0.0, 0.0, -10.0);
  Direction d_hat = Direction::x();
  double decay_rate = 1.0;
  cplx rabi1 = 0.0;
  cplx rabi2 = 0.0;

  double wavenumber() const { return kWavenumber; }
  Vec3 separation() const { return r1 - r2; }

  /// Throws std::invalid_argument on a non-positive decay rate or
  /// non-finite parameters.
  void validate() const;

  /// Atoms at +-(r/2) z, dipole along x: the default screen geometry.
  static ExperimentConfig on_z_axis(double separation, cplx rabi1, cplx rabi2,
                                    double decay_rate = 1.0);
};

/// 1 - |d.k|^2
double angular_factor(const Direction& d_hat, const Direction& k_hat);

/// 3A/(8 pi) (1 - |d.k|^2): density prefactor of a single emitter.
double dipole_prefactor(const Direction& k_hat, const ExperimentConfig& cfg);

/// k0 k.(r1 - r2): relative optical phase of the two emitters.
double relative_phase(const Direction& k_hat, const ExperimentConfig& cfg);

/// sum_i exp(-i k0 k.r_i) S_i^- |psi>, the atomic part of the click state
/// without the dipole prefactor.
PureState4 emitted_amplitude(const PureState4& psi, const Direction& k_hat,
                             const ExperimentConfig& cfg);

/// Probability density per unit time and solid angle for a click in k_hat.
/// Throws InvariantError unless psi is normalized to 1e-9.
double emission_density_pure(const PureState4& psi, const Direction& k_hat,
                             const ExperimentConfig& cfg);

struct ResetState {
  PureState4 state;  // normalized
  double weight;     // equals emission_density_pure at the same arguments
};

/// The click is impossible in this direction (zero weight).
struct NoEmission {};

using ResetOutcome = std::variant<ResetState, NoEmission>;

/// Normalized atomic state right after a click in k_hat.
ResetOutcome reset_state(const PureState4& psi, const Direction& k_hat,
                         const ExperimentConfig& cfg);

/// A (||S_1^- psi||^2 + ||S_2^- psi||^2)
double total_emission_rate(const PureState4& psi, const ExperimentConfig& cfg);

/// (3A/8pi) * integral over the sphere of (1 - |d.k|^2) exp(-i k0 k.(r1 - r2)).
/// Equals A at zero separation; it weighs the interference term in the
/// sphere-integrated click rate.
cplx cross_term_gamma(const ExperimentConfig& cfg,
                      const SphereQuadrature& quadrature = SphereQuadrature());

/// Density for a mixed two-atom state. Reduces to emission_density_pure for
/// rho = |psi><psi|.
double emission_density_mixed(const DensityMatrix4& rho, const Direction& k_hat,
                              const ExperimentConfig& cfg);

/// Raised when an operation needs excited-state population and there is none.
class NoEmissionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// |<S1 psi|S2 psi>| / (||S1 psi|| ||S2 psi||); 0 when exactly one image
/// vanishes (full which-way information). Throws NoEmissionError when both do.
double overlap_which_way(const PureState4& psi);

}  // namespace twoatom
