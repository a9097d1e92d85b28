#include "twoatom/steady_state.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twoatom {

namespace {

struct Operators {
  Eigen::Matrix4cd lower1 = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd lower2 = Eigen::Matrix4cd::Zero();
  Operators() {
    lower1(k11, k21) = 1.0;
    lower1(k12, k22) = 1.0;
    lower2(k11, k12) = 1.0;
    lower2(k21, k22) = 1.0;
  }
};

const Operators& ops() {
  static const Operators o;
  return o;
}

void require_positive_rate(double decay_rate) {
  if (!(decay_rate > 0.0) || !std::isfinite(decay_rate)) {
    throw std::invalid_argument("decay rate A must be positive and finite");
  }
}

// Hermitian 4x4 <-> 16 reals: 4 diagonal entries, then Re/Im of the 6
// upper off-diagonal entries.
using RealState = std::array<double, 16>;

RealState pack(const Eigen::Matrix4cd& m) {
  RealState x{};
  std::size_t n = 0;
  for (int i = 0; i < 4; ++i) {
    x[n++] = m(i, i).real();
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      x[n++] = m(i, j).real();
      x[n++] = m(i, j).imag();
    }
  }
  return x;
}

Eigen::Matrix4cd unpack(const RealState& x) {
  Eigen::Matrix4cd m;
  std::size_t n = 0;
  for (int i = 0; i < 4; ++i) {
    m(i, i) = x[n++];
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const cplx v(x[n], x[n + 1]);
      n += 2;
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

double max_abs(const Eigen::Matrix4cd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

SingleAtomDensity single_atom_steady(cplx rabi, double decay_rate) {
  require_positive_rate(decay_rate);
  const double a = decay_rate;
  const double w2 = std::norm(rabi);
  const double denom = a * a + 2.0 * w2;
  Eigen::Matrix2cd m;
  m(1, 1) = w2 / denom;
  m(0, 0) = 1.0 - w2 / denom;
  m(0, 1) = cplx(0.0, 1.0) * rabi * a / denom;
  m(1, 0) = std::conj(m(0, 1));
  return SingleAtomDensity(m);
}

double steady_excited_population(cplx rabi, double decay_rate) {
  require_positive_rate(decay_rate);
  const double w2 = std::norm(rabi);
  return w2 / (decay_rate * decay_rate + 2.0 * w2);
}

SteadyStateSolution two_atom_steady(const ExperimentConfig& cfg, const SingleAtomSteadyFn& factor) {
  cfg.validate();
  DensityMatrix4 rho = tensor(factor(cfg.rabi1, cfg.decay_rate), factor(cfg.rabi2, cfg.decay_rate));
  const double residual = max_abs(master_rhs(rho.matrix(), cfg));
  return SteadyStateSolution{std::move(rho), residual, SteadyMethod::closed_form_product};
}

Eigen::Matrix4cd master_rhs(const Eigen::Matrix4cd& rho, const ExperimentConfig& cfg) {
  const auto& o = ops();
  const Eigen::Matrix4cd raise1 = o.lower1.adjoint();
  const Eigen::Matrix4cd raise2 = o.lower2.adjoint();
  const Eigen::Matrix4cd h = 0.5 * (std::conj(cfg.rabi1) * raise1 + cfg.rabi1 * o.lower1 +
                                    std::conj(cfg.rabi2) * raise2 + cfg.rabi2 * o.lower2);
  const cplx minus_i(0.0, -1.0);
  Eigen::Matrix4cd out = minus_i * (h * rho - rho * h);
  for (const auto* lower : {&o.lower1, &o.lower2}) {
    const Eigen::Matrix4cd raise = lower->adjoint();
    const Eigen::Matrix4cd number = raise * *lower;
    out += cfg.decay_rate * (*lower * rho * raise - 0.5 * (number * rho + rho * number));
  }
  return out;
}

SteadyStateSolution time_integrate_to_steady(const ExperimentConfig& cfg, double tol,
                                             const IntegratorOptions& options) {
  namespace ode = boost::numeric::odeint;
  cfg.validate();
  if (!(tol > 0.0)) {
    throw std::invalid_argument("time_integrate_to_steady: tol must be positive");
  }
  Eigen::Matrix4cd start = Eigen::Matrix4cd::Zero();
  start(k11, k11) = 1.0;
  RealState x = pack(start);

  auto system = [&cfg](const RealState& state, RealState& dxdt, double /*t*/) {
    dxdt = pack(master_rhs(unpack(state), cfg));
  };
  auto stepper = ode::make_controlled(options.abs_tolerance, options.rel_tolerance,
                                      ode::runge_kutta_dopri5<RealState>());

  double t = 0.0;
  double dt = options.initial_step / cfg.decay_rate;
  double residual = max_abs(master_rhs(unpack(x), cfg));
  std::size_t steps = 0;
  while (residual >= tol) {
    if (steps >= options.max_steps) {
      throw ConvergenceError("master equation did not reach the requested residual within " +
                             std::to_string(options.max_steps) + " steps");
    }
    if (stepper.try_step(system, x, t, dt) == ode::success) {
      ++steps;
      residual = max_abs(master_rhs(unpack(x), cfg));
    }
  }
  Eigen::Matrix4cd rho = unpack(x);
  // Integration error accumulates in the trace at the 1e-13 level.
  rho /= rho.trace();
  return SteadyStateSolution{DensityMatrix4(rho), residual, SteadyMethod::time_integration};
}

double steady_emission_density(const ExperimentConfig& cfg, const Direction& k_hat) {
  const double a2 = cfg.decay_rate * cfg.decay_rate;
  const double w1 = std::norm(cfg.rabi1);
  const double w2 = std::norm(cfg.rabi2);
  const double denom = (a2 + 2.0 * w1) * (a2 + 2.0 * w2);
  const cplx fringe =
      std::conj(cfg.rabi1) * cfg.rabi2 * std::polar(1.0, -relative_phase(k_hat, cfg));
  const double bracket = 4.0 * w1 * w2 + a2 * w1 + a2 * w2 + 2.0 * a2 * fringe.real();
  return std::max(0.0, dipole_prefactor(k_hat, cfg) * bracket / denom);
}

double steady_fringe_visibility(const ExperimentConfig& cfg) {
  const double a2 = cfg.decay_rate * cfg.decay_rate;
  const double w1 = std::norm(cfg.rabi1);
  const double w2 = std::norm(cfg.rabi2);
  const double flat = 4.0 * w1 * w2 + a2 * (w1 + w2);
  if (flat <= 0.0) {
    return 0.0;
  }
  return 2.0 * a2 * std::sqrt(w1 * w2) / flat;
}

double steady_total_rate(const ExperimentConfig& cfg) {
  const double p1 = steady_excited_population(cfg.rabi1, cfg.decay_rate);
  const double p2 = steady_excited_population(cfg.rabi2, cfg.decay_rate);
  const double a2 = cfg.decay_rate * cfg.decay_rate;
  const cplx coherence = std::conj(cfg.rabi1) * cfg.rabi2 * a2 /
                         ((a2 + 2.0 * std::norm(cfg.rabi1)) * (a2 + 2.0 * std::norm(cfg.rabi2)));
  return cfg.decay_rate * (p1 + p2) + 2.0 * (coherence * cross_term_gamma(cfg)).real();
}

}  // namespace twoatom
