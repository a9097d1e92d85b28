#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "twoatom/steady_state.hpp"

#include <cmath>

using namespace twoatom;

namespace {

const cplx kDrives[] = {0.0, 0.1, 0.3, 1.0, 3.0};

std::vector<std::pair<cplx, cplx>> sweep() {
  std::vector<std::pair<cplx, cplx>> out;
  for (cplx w : kDrives) {
    out.emplace_back(w, w);
    out.emplace_back(w, std::polar(std::abs(w) * 0.7 + 0.05, 1.1));
    out.emplace_back(w * std::polar(1.0, -2.3), cplx(0.2, 0.1));
  }
  return out;
}

// Single-atom optical Bloch equations with H = (1/2)(conj(W) S+ + W S-),
// integrated by fixed-step RK4 long enough to forget |1><1|. Returns the
// excited population and <1|rho|2>.
std::pair<double, cplx> bloch_oracle(cplx rabi, double a) {
  Eigen::Matrix2cd splus = Eigen::Matrix2cd::Zero();
  splus(1, 0) = 1.0;
  const Eigen::Matrix2cd sminus = splus.adjoint();
  const Eigen::Matrix2cd h = 0.5 * (std::conj(rabi) * splus + rabi * sminus);
  auto rhs = [&](const Eigen::Matrix2cd& r) {
    const Eigen::Matrix2cd n = splus * sminus;
    return Eigen::Matrix2cd(cplx(0.0, -1.0) * (h * r - r * h) +
                            a * (sminus * r * splus - 0.5 * (n * r + r * n)));
  };
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  r(0, 0) = 1.0;
  const double dt = 0.01;
  for (int i = 0; i < 20000; ++i) {
    const Eigen::Matrix2cd k1 = rhs(r);
    const Eigen::Matrix2cd k2 = rhs(r + 0.5 * dt * k1);
    const Eigen::Matrix2cd k3 = rhs(r + 0.5 * dt * k2);
    const Eigen::Matrix2cd k4 = rhs(r + dt * k3);
    r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {r(1, 1).real(), r(0, 1)};
}

}  // namespace

TEST_CASE("single-atom closed form") {
  const SingleAtomDensity g = single_atom_steady(0.0, 1.0);
  CHECK((g.matrix() - SingleAtomDensity::ground().matrix()).norm() == 0.0);
  CHECK(steady_excited_population(1e6, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(steady_excited_population(0.3, 1.0) == doctest::Approx(0.09 / 1.18).epsilon(1e-15));
  CHECK(steady_excited_population(0.3, 1.0) == doctest::Approx(0.076271).epsilon(1e-5));
  CHECK_THROWS_AS(single_atom_steady(0.3, 0.0), std::invalid_argument);

  for (cplx w : {cplx(0.3), cplx(0.2, 0.5), std::polar(1.4, 2.0)}) {
    const SingleAtomDensity s = single_atom_steady(w, 1.3);
    const auto [p, c] = bloch_oracle(w, 1.3);
    CHECK(s(Level::excited, Level::excited).real() == doctest::Approx(p).epsilon(1e-10));
    CHECK(std::abs(s(Level::ground, Level::excited) - c) < 1e-10);
    CHECK(std::abs(s(Level::ground, Level::excited)) ==
          doctest::Approx(1.3 * std::abs(w) / (1.69 + 2.0 * std::norm(w))).epsilon(1e-14));
  }
}

TEST_CASE("two-atom product") {
  const auto off = two_atom_steady(ExperimentConfig::on_z_axis(20.0, 0.0, 0.0));
  CHECK(std::abs(off.rho(k11, k11) - 1.0) == 0.0);
  CHECK(off.method == SteadyMethod::closed_form_product);

  const auto half = two_atom_steady(ExperimentConfig::on_z_axis(20.0, 0.0, 0.4));
  CHECK(std::abs(half.rho(k12, k21)) == 0.0);
  CHECK(std::abs(half.rho(k21, k21)) == 0.0);

  const auto fig = two_atom_steady(ExperimentConfig::on_z_axis(20.0, 0.3, 0.3));
  const double p = 0.09 / 1.18;
  CHECK(fig.rho(k22, k22).real() == doctest::Approx(p * p).epsilon(1e-14));
  CHECK(fig.rho(k22, k22).real() == doctest::Approx(0.005817).epsilon(1e-4));

  // <12|rho|21> = W1 conj(W2) A^2 / (D1 D2)
  const cplx w1(0.2, -0.3);
  const cplx w2 = std::polar(0.7, kPi / 3.0);
  const auto asym = two_atom_steady(ExperimentConfig::on_z_axis(20.0, w1, w2));
  const double d1 = 1.0 + 2.0 * std::norm(w1);
  const double d2 = 1.0 + 2.0 * std::norm(w2);
  CHECK(std::abs(asym.rho(k12, k21) - w1 * std::conj(w2) / (d1 * d2)) < 1e-15);
}

TEST_CASE("master equation basics") {
  const auto cfg0 = ExperimentConfig::on_z_axis(20.0, 0.0, 0.0);
  Eigen::Matrix4cd ground = Eigen::Matrix4cd::Zero();
  ground(k11, k11) = 1.0;
  CHECK(master_rhs(ground, cfg0).norm() == 0.0);

  Eigen::Matrix4cd top = Eigen::Matrix4cd::Zero();
  top(k22, k22) = 1.0;
  const Eigen::Matrix4cd d = master_rhs(top, cfg0);
  CHECK(d(k22, k22).real() == doctest::Approx(-2.0));
  CHECK(d(k12, k12).real() == doctest::Approx(1.0));
  CHECK(d(k21, k21).real() == doctest::Approx(1.0));

  Rng rng(21);
  const auto cfg = ExperimentConfig::on_z_axis(20.0, cplx(0.4, 0.2), cplx(-0.1, 0.9));
  for (int n = 0; n < 20; ++n) {
    const Eigen::Matrix4cd rho = dm_from_pure(oracle::random_state(rng)).matrix();
    const Eigen::Matrix4cd out = master_rhs(rho, cfg);
    CHECK(std::abs(out.trace()) <= 1e-14);
    CHECK((out - out.adjoint()).norm() <= 1e-14);
  }
}

TEST_CASE("closed form is a fixed point") {
  for (const auto& [w1, w2] : sweep()) {
    const auto sol = two_atom_steady(ExperimentConfig::on_z_axis(20.0, w1, w2));
    CHECK(sol.residual <= 1e-10);
  }
}

TEST_CASE("time integration agrees with the closed form") {
  const auto idle = time_integrate_to_steady(ExperimentConfig::on_z_axis(20.0, 0.0, 0.0), 1e-10);
  CHECK(std::abs(idle.rho(k11, k11) - 1.0) == 0.0);
  CHECK(idle.method == SteadyMethod::time_integration);

  for (const auto& [w1, w2] :
       std::vector<std::pair<cplx, cplx>>{{0.3, 0.3}, {0.2, std::polar(0.7, kPi / 3.0)}, {3.0, 0.1}}) {
    const auto cfg = ExperimentConfig::on_z_axis(20.0, w1, w2);
    const auto numeric = time_integrate_to_steady(cfg, 1e-10);
    const auto exact = two_atom_steady(cfg);
    CHECK((numeric.rho.matrix() - exact.rho.matrix()).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(numeric.residual < 1e-10);
  }

  IntegratorOptions tiny;
  tiny.max_steps = 3;
  CHECK_THROWS_AS(time_integrate_to_steady(ExperimentConfig::on_z_axis(20.0, 0.3, 0.3), 1e-12, tiny),
                  ConvergenceError);
  CHECK_THROWS_AS(time_integrate_to_steady(ExperimentConfig::on_z_axis(20.0, 0.3, 0.3), 0.0),
                  std::invalid_argument);
}

TEST_CASE("closed-form pattern") {
  Rng rng(22);
  for (const auto& [w1, w2] : sweep()) {
    ExperimentConfig cfg = ExperimentConfig::on_z_axis(7.3, w1, w2);
    cfg.d_hat = Direction::from_vector(Vec3(0.3, 0.8, 0.2));
    const DensityMatrix4 rho = two_atom_steady(cfg).rho;
    for (int n = 0; n < 16; ++n) {
      const Direction k = oracle::random_direction(rng);
      const double closed = steady_emission_density(cfg, k);
      const double oracle_value =
          oracle::steady_density(w1, w2, k.vector(), cfg.r1, cfg.r2, cfg.d_hat.vector());
      CHECK(std::abs(closed - oracle_value) <= 1e-13 * std::max(oracle_value, 1e-300) + 1e-300);
      const double mixed = emission_density_mixed(rho, k, cfg);
      CHECK(std::abs(closed - mixed) <= 1e-12 * std::max(closed, 1e-300));
    }
  }

  // Constructive maximum for equal real drives, k perpendicular to d and zero phase.
  const double w = 0.3;
  const auto cfg = ExperimentConfig::on_z_axis(20.0, w, w);
  const Direction k = Direction::y();
  const double expected =
      3.0 / (8.0 * kPi) * (4.0 * w * w * w * w + 4.0 * w * w) / ((1.0 + 2.0 * w * w) * (1.0 + 2.0 * w * w));
  CHECK(steady_emission_density(cfg, k) == doctest::Approx(expected).epsilon(1e-14));

  const auto single = ExperimentConfig::on_z_axis(20.0, 0.5, 0.0);
  const double a = steady_emission_density(single, Direction::from_angles(1.0, 1.3));
  const double b = steady_emission_density(single, Direction::from_angles(kPi - 1.0, 1.3));
  CHECK(a == doctest::Approx(b).epsilon(1e-15));
}

TEST_CASE("visibility formula and saturation") {
  CHECK(steady_fringe_visibility(ExperimentConfig::on_z_axis(20.0, 0.3, 0.3)) ==
        doctest::Approx(1.0 / 1.18).epsilon(1e-15));
  CHECK(steady_fringe_visibility(ExperimentConfig::on_z_axis(20.0, 0.3, 0.0)) == 0.0);
  double previous = 1.0;
  for (double w : {0.05, 0.1, 0.3, 1.0, 3.0}) {
    const double v = steady_fringe_visibility(ExperimentConfig::on_z_axis(20.0, w, w));
    CHECK(v == doctest::Approx(1.0 / (1.0 + 2.0 * w * w)).epsilon(1e-14));
    CHECK(v < previous);
    previous = v;
  }
  // Max and min of the bracket along a line of constant dipole factor.
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.3, cplx(0.1, 0.5));
  double hi = 0.0;
  double lo = 1e9;
  for (int i = 0; i <= 20000; ++i) {
    const double u = -1.0 + 2.0 * i / 20000.0;
    const double v = steady_emission_density(cfg, Direction::from_vector(Vec3(0.0, std::sqrt(1.0 - u * u), u)));
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  CHECK((hi - lo) / (hi + lo) == doctest::Approx(steady_fringe_visibility(cfg)).epsilon(1e-4));
}

TEST_CASE("phase of the second drive shifts the fringes") {
  // Along phi = pi/2 the fringe variable is k0 r cos(theta); the maximum sits
  // where it equals arg(conj(W1) W2) modulo 2 pi.
  for (double chi : {0.0, 0.7, 2.0, -1.4}) {
    const auto cfg = ExperimentConfig::on_z_axis(1.0, 0.3, std::polar(0.3, chi));
    double best = -1.0;
    double best_phase = 0.0;
    for (int i = 0; i <= 200000; ++i) {
      const double u = -1.0 + 2.0 * i / 200000.0;
      const Direction k = Direction::from_vector(Vec3(0.0, std::sqrt(1.0 - u * u), u));
      const double v = steady_emission_density(cfg, k);
      if (v > best) {
        best = v;
        best_phase = relative_phase(k, cfg);
      }
    }
    const double diff = std::remainder(best_phase - chi, 2.0 * kPi);
    CHECK(std::abs(diff) < 1e-3);
  }
}

TEST_CASE("total steady rate") {
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.3, 0.3);
  const double p = 0.09 / 1.18;
  CHECK(steady_total_rate(cfg) == doctest::Approx(2.0 * p).epsilon(2e-3));
  const auto merged = ExperimentConfig::on_z_axis(0.0, 0.3, 0.3);
  // Zero separation: gamma = A and the coherence adds fully.
  const double coherence = 0.09 / (1.18 * 1.18);
  CHECK(steady_total_rate(merged) == doctest::Approx(2.0 * p + 2.0 * coherence).epsilon(1e-12));
}
