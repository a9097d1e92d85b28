#pragma once

// Quantum-jump simulation of the screen's repeated photon measurements.
//
// Each step of length dt either records a click (probability rate * dt, the
// direction drawn from the emission density of the current state, the state
// replaced by the reset state) or applies the no-click propagator
// exp(-i H_cond dt) and renormalizes, with
//
//     H_cond = H_L - (i A / 2) sum_i S_i^+ S_i^-
//
// and H_L as in steady_state.hpp.

#include "twoatom/emission_law.hpp"
#include "twoatom/quantum_core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace twoatom {

/// Largest admissible A * dt.
inline constexpr double kMaxDecayStep = 0.05;
inline constexpr double kDefaultStep = 0.01;

/// Seeded 64-bit Mersenne Twister with a fixed, platform-independent
/// conversion to doubles (53 random bits).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 mix of (base, index): independent seeds for parallel streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct TrajectoryState {
  PureState4 psi;
  double t = 0.0;
};

struct ClickRecord {
  double t;
  Direction direction;
};

struct ClickStream {
  std::uint64_t seed = 0;
  ExperimentConfig cfg;
  double dt = kDefaultStep;
  double duration = 0.0;
  std::vector<ClickRecord> records;
};

/// Throws std::invalid_argument unless 0 < A dt <= kMaxDecayStep.
void validate_step(double dt, const ExperimentConfig& cfg);

/// exp(-i H_cond dt), precomputed once per (cfg, dt).
class NoClickPropagator {
 public:
  NoClickPropagator(const ExperimentConfig& cfg, double dt);
  /// Evolves and renormalizes.
  PureState4 apply(const PureState4& psi) const;
  const Eigen::Matrix4cd& matrix() const { return u_; }

 private:
  Eigen::Matrix4cd u_;
};

TrajectoryState no_click_step(const TrajectoryState& state, double dt, const ExperimentConfig& cfg);

/// total_emission_rate * dt, clamped below one.
double jump_probability(const TrajectoryState& state, double dt, const ExperimentConfig& cfg);

/// Upper bound of emission_density_pure over all directions:
/// (3A/8pi)(||S_1^- psi|| + ||S_2^- psi||)^2.
double direction_density_bound(const PureState4& psi, const ExperimentConfig& cfg);

/// Rejection sampling from the emission density of psi with a uniform
/// sphere proposal. Acceptance probability is at least 1/3.
/// envelope_scale multiplies the bound; anything below 1 is a deliberately
/// broken sampler used by the self-test. Throws NoEmissionError without
/// excited population.
Direction sample_direction(const PureState4& psi, const ExperimentConfig& cfg, Rng& rng,
                           double envelope_scale = 1.0);

/// Step-by-step engine shared by run() and the first-click experiments.
class TrajectoryEngine {
 public:
  TrajectoryEngine(const ExperimentConfig& cfg, double dt);

  /// Advances by one step; returns the click if one occurred.
  std::optional<ClickRecord> step(TrajectoryState& state, Rng& rng) const;

  double dt() const { return dt_; }

 private:
  ExperimentConfig cfg_;
  double dt_;
  NoClickPropagator propagator_;
};

/// Full trajectory from |11> at t = 0. Deterministic in its arguments.
ClickStream run(const ExperimentConfig& cfg, double duration, double dt, std::uint64_t seed);

/// Steps from psi0 until the first click or max_time, whichever is first.
std::optional<ClickRecord> first_click(const ExperimentConfig& cfg, const PureState4& psi0,
                                       double dt, double max_time, Rng& rng);

}  // namespace twoatom
