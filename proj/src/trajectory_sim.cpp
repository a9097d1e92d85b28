#include "twoatom/trajectory_sim.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twoatom {

namespace {

constexpr long kMaxRejections = 10'000'000;

double excited_weight(const Eigen::Vector4cd& a) {
  // ||S_1^- psi||^2 + ||S_2^- psi||^2
  return std::norm(a[k12]) + std::norm(a[k21]) + 2.0 * std::norm(a[k22]);
}

Eigen::Matrix4cd conditional_hamiltonian(const ExperimentConfig& cfg) {
  Eigen::Matrix4cd lower1 = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd lower2 = Eigen::Matrix4cd::Zero();
  lower1(k11, k21) = 1.0;
  lower1(k12, k22) = 1.0;
  lower2(k11, k12) = 1.0;
  lower2(k21, k22) = 1.0;
  const Eigen::Matrix4cd raise1 = lower1.adjoint();
  const Eigen::Matrix4cd raise2 = lower2.adjoint();
  const Eigen::Matrix4cd h = 0.5 * (std::conj(cfg.rabi1) * raise1 + cfg.rabi1 * lower1 +
                                    std::conj(cfg.rabi2) * raise2 + cfg.rabi2 * lower2);
  const cplx half_decay(0.0, 0.5 * cfg.decay_rate);
  return h - half_decay * (raise1 * lower1 + raise2 * lower2);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void validate_step(double dt, const ExperimentConfig& cfg) {
  if (!(dt > 0.0) || !(cfg.decay_rate * dt <= kMaxDecayStep)) {
    throw std::invalid_argument("time step outside the validity window 0 < A dt <= 0.05");
  }
}

NoClickPropagator::NoClickPropagator(const ExperimentConfig& cfg, double dt) {
  cfg.validate();
  validate_step(dt, cfg);
  const Eigen::Matrix4cd generator = cplx(0.0, -dt) * conditional_hamiltonian(cfg);
  u_ = generator.exp();
}

PureState4 NoClickPropagator::apply(const PureState4& psi) const {
  Eigen::Vector4cd next = u_ * psi.amplitudes();
  next /= next.norm();
  return PureState4(next);
}

TrajectoryState no_click_step(const TrajectoryState& state, double dt, const ExperimentConfig& cfg) {
  const NoClickPropagator prop(cfg, dt);
  return TrajectoryState{prop.apply(state.psi), state.t + dt};
}

double jump_probability(const TrajectoryState& state, double dt, const ExperimentConfig& cfg) {
  validate_step(dt, cfg);
  const double p = total_emission_rate(state.psi, cfg) * dt;
  return std::min(p, std::nextafter(1.0, 0.0));
}

double direction_density_bound(const PureState4& psi, const ExperimentConfig& cfg) {
  const double n1 = std::sqrt(apply_lowering(psi, Atom::first).norm_squared());
  const double n2 = std::sqrt(apply_lowering(psi, Atom::second).norm_squared());
  return 3.0 * cfg.decay_rate / (8.0 * kPi) * (n1 + n2) * (n1 + n2);
}

Direction sample_direction(const PureState4& psi, const ExperimentConfig& cfg, Rng& rng,
                           double envelope_scale) {
  if (!(total_emission_rate(psi, cfg) > 0.0)) {
    throw NoEmissionError("sample_direction: state has no excited population");
  }
  const double bound = envelope_scale * direction_density_bound(psi, cfg);
  for (long attempt = 0; attempt < kMaxRejections; ++attempt) {
    const double ct = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * kPi * rng.uniform();
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const Direction k = Direction::from_vector(Vec3(st * std::cos(phi), st * std::sin(phi), ct));
    const double density = emission_density_pure(psi, k, cfg);
    if (density > 0.0 && rng.uniform() * bound < density) {
      return k;
    }
  }
  throw std::logic_error("sample_direction: rejection sampler failed to accept");
}

TrajectoryEngine::TrajectoryEngine(const ExperimentConfig& cfg, double dt)
    : cfg_(cfg), dt_(dt), propagator_(cfg, dt) {}

std::optional<ClickRecord> TrajectoryEngine::step(TrajectoryState& state, Rng& rng) const {
  const double p = std::min(cfg_.decay_rate * excited_weight(state.psi.amplitudes()) * dt_,
                            std::nextafter(1.0, 0.0));
  const double u = rng.uniform();
  state.t += dt_;
  if (u < p) {
    const Direction k = sample_direction(state.psi, cfg_, rng);
    const ResetOutcome outcome = reset_state(state.psi, k, cfg_);
    const auto* reset = std::get_if<ResetState>(&outcome);
    if (reset == nullptr) {
      throw std::logic_error("accepted click direction has zero weight");
    }
    state.psi = reset->state;
    return ClickRecord{state.t, k};
  }
  state.psi = propagator_.apply(state.psi);
  return std::nullopt;
}

ClickStream run(const ExperimentConfig& cfg, double duration, double dt, std::uint64_t seed) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("run: duration must be positive");
  }
  const TrajectoryEngine engine(cfg, dt);
  ClickStream stream;
  stream.seed = seed;
  stream.cfg = cfg;
  stream.dt = dt;
  stream.duration = duration;

  Rng rng(seed);
  TrajectoryState state{PureState4::basis(Level::ground, Level::ground), 0.0};
  const auto steps = static_cast<std::uint64_t>(std::llround(duration / dt));
  for (std::uint64_t n = 0; n < steps; ++n) {
    auto click = engine.step(state, rng);
    // Integer step count keeps times free of accumulated rounding.
    state.t = static_cast<double>(n + 1) * dt;
    if (click) {
      click->t = state.t;
      stream.records.push_back(*click);
    }
  }
  return stream;
}

std::optional<ClickRecord> first_click(const ExperimentConfig& cfg, const PureState4& psi0,
                                       double dt, double max_time, Rng& rng) {
  const TrajectoryEngine engine(cfg, dt);
  TrajectoryState state{psi0.normalized(), 0.0};
  const auto steps = static_cast<std::uint64_t>(std::llround(max_time / dt));
  for (std::uint64_t n = 0; n < steps; ++n) {
    if (auto click = engine.step(state, rng)) {
      return click;
    }
  }
  return std::nullopt;
}

}  // namespace twoatom
