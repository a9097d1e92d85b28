#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "twoatom/steady_state.hpp"
#include "twoatom/trajectory_sim.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>

using namespace twoatom;

namespace {

const PureState4 s11 = PureState4::basis(Level::ground, Level::ground);
const PureState4 s12 = PureState4::basis(Level::ground, Level::excited);
const PureState4 s21 = PureState4::basis(Level::excited, Level::ground);
const PureState4 s22 = PureState4::basis(Level::excited, Level::excited);
const PureState4 bell = (1.0 / std::sqrt(2.0)) * (s12 + s21);

double chi2_pvalue(const std::vector<double>& observed, const std::vector<double>& expected) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  }
  const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

}  // namespace

TEST_CASE("rng is deterministic and in range") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("step validity window") {
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.3, 0.3);
  CHECK_NOTHROW(validate_step(0.05, cfg));
  CHECK_THROWS_AS(validate_step(0.0501, cfg), std::invalid_argument);
  CHECK_THROWS_AS(validate_step(0.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(TrajectoryEngine(cfg, 0.1), std::invalid_argument);
}

TEST_CASE("no-click evolution") {
  const auto dark = ExperimentConfig::on_z_axis(20.0, 0.0, 0.0);
  const TrajectoryState g = no_click_step({s11, 0.0}, 0.01, dark);
  CHECK((g.psi.amplitudes() - s11.amplitudes()).norm() == 0.0);
  CHECK(g.t == doctest::Approx(0.01));

  const TrajectoryState top = no_click_step({s22, 0.0}, 0.01, dark);
  CHECK(std::abs(top.psi[k22]) == doctest::Approx(1.0).epsilon(1e-15));

  // (|12> + |22>)/sqrt2: |12> decays at A/2, |22> at A, so the ratio a12/a22
  // grows by exp(A dt / 2).
  const double dt = 0.02;
  const PureState4 mix = (1.0 / std::sqrt(2.0)) * (s12 + s22);
  const TrajectoryState out = no_click_step({mix, 0.0}, dt, dark);
  CHECK(std::abs(out.psi[k12] / out.psi[k22]) == doctest::Approx(std::exp(0.5 * dt)).epsilon(1e-14));
  CHECK(out.psi.is_normalized(1e-14));

  // Driven evolution against a Taylor-series exponential of -i H dt.
  const auto driven = ExperimentConfig::on_z_axis(20.0, cplx(0.4, 0.1), cplx(-0.2, 0.6));
  Eigen::Matrix4cd l1 = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd l2 = Eigen::Matrix4cd::Zero();
  l1(0, 2) = l1(1, 3) = l2(0, 1) = l2(2, 3) = 1.0;
  const Eigen::Matrix4cd h = 0.5 * (std::conj(driven.rabi1) * l1.adjoint() + driven.rabi1 * l1 +
                                    std::conj(driven.rabi2) * l2.adjoint() + driven.rabi2 * l2) -
                             cplx(0.0, 0.5) * (l1.adjoint() * l1 + l2.adjoint() * l2);
  Eigen::Matrix4cd term = Eigen::Matrix4cd::Identity();
  Eigen::Matrix4cd sum = term;
  for (int n = 1; n < 30; ++n) {
    term = term * (cplx(0.0, -dt) * h) / static_cast<double>(n);
    sum += term;
  }
  CHECK((NoClickPropagator(driven, dt).matrix() - sum).norm() < 1e-14);
}

TEST_CASE("jump probability") {
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.0, 0.0);
  CHECK(jump_probability({s11, 0.0}, 0.01, cfg) == 0.0);
  CHECK(jump_probability({s22, 0.0}, 0.01, cfg) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(jump_probability({bell, 0.0}, 0.01, cfg) == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("rejection envelope bounds the density") {
  Rng rng(31);
  ExperimentConfig cfg = ExperimentConfig::on_z_axis(2.3, 0.0, 0.0);
  cfg.d_hat = Direction::from_vector(Vec3(0.4, -0.2, 0.9));
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const PureState4 psi = oracle::random_state(rng);
    const double bound = direction_density_bound(psi, cfg);
    for (int m = 0; m < 1000; ++m) {
      worst = std::max(worst, emission_density_pure(psi, oracle::random_direction(rng), cfg) / bound);
    }
  }
  CHECK(worst <= 1.0 + 1e-12);
  // The bound is attained for the symmetric single-excitation state.
  const auto z = ExperimentConfig::on_z_axis(2.0, 0.0, 0.0);
  CHECK(emission_density_pure(bell, Direction::y(), z) ==
        doctest::Approx(direction_density_bound(bell, z)).epsilon(1e-14));
}

TEST_CASE("sampled directions follow the single-dipole law") {
  // psi = |21>, d = z: density proportional to sin^2(theta); the cos(theta)
  // marginal is (3/4)(1 - u^2) on [-1, 1].
  ExperimentConfig cfg = ExperimentConfig::on_z_axis(20.0, 0.0, 0.0);
  cfg.d_hat = Direction::z();
  Rng rng(32);
  constexpr int kBins = 20;
  constexpr int kSamples = 100000;
  std::vector<double> counts(kBins, 0.0);
  std::vector<double> phi_counts(kBins, 0.0);
  for (int n = 0; n < kSamples; ++n) {
    const Direction k = sample_direction(s21, cfg, rng);
    const double u = k.vector().z();
    counts[static_cast<std::size_t>(std::min(kBins - 1, static_cast<int>((u + 1.0) * 0.5 * kBins)))] += 1.0;
    phi_counts[static_cast<std::size_t>(std::min(kBins - 1, static_cast<int>(k.phi() / (2.0 * kPi) * kBins)))] +=
        1.0;
  }
  std::vector<double> expected(kBins);
  for (int b = 0; b < kBins; ++b) {
    const double lo = -1.0 + 2.0 * b / kBins;
    const double hi = lo + 2.0 / kBins;
    expected[static_cast<std::size_t>(b)] =
        kSamples * 0.75 * ((hi - lo) - (hi * hi * hi - lo * lo * lo) / 3.0);
  }
  CHECK(chi2_pvalue(counts, expected) > 0.01);
  CHECK(chi2_pvalue(phi_counts, std::vector<double>(kBins, kSamples / double(kBins))) > 0.01);
}

TEST_CASE("sampling a symmetric state shows full fringes") {
  const auto cfg = ExperimentConfig::on_z_axis(3.0, 0.0, 0.0);
  Rng rng(33);
  constexpr int kBins = 24;
  constexpr int kSamples = 200000;
  std::vector<double> counts(kBins, 0.0);
  for (int n = 0; n < kSamples; ++n) {
    const double phase = std::fmod(relative_phase(sample_direction(bell, cfg, rng), cfg) + 400.0 * kPi,
                                   2.0 * kPi);
    counts[static_cast<std::size_t>(std::min(kBins - 1, static_cast<int>(phase / (2.0 * kPi) * kBins)))] += 1.0;
  }
  // First Fourier harmonic relative to the mean: 1 + cos(phase) has ratio 1/2,
  // reduced by the bin-width sinc.
  double c = 0.0;
  double s = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double x = (b + 0.5) * 2.0 * kPi / kBins;
    c += counts[static_cast<std::size_t>(b)] * std::cos(x);
    s += counts[static_cast<std::size_t>(b)] * std::sin(x);
  }
  const double sinc = std::sin(kPi / kBins) / (kPi / kBins);
  const double v = 2.0 * std::hypot(c, s) / kSamples / sinc;
  CHECK(v == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("sampling without excitation is rejected") {
  Rng rng(34);
  CHECK_THROWS_AS(sample_direction(s11, ExperimentConfig(), rng), NoEmissionError);
}

TEST_CASE("run is deterministic and starts dark") {
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.3, 0.3);
  const ClickStream a = run(cfg, 500.0, kDefaultStep, 77);
  const ClickStream b = run(cfg, 500.0, kDefaultStep, 77);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].t == b.records[i].t);
    CHECK(a.records[i].direction.vector() == b.records[i].direction.vector());
  }
  for (std::size_t i = 1; i < a.records.size(); ++i) {
    CHECK(a.records[i].t > a.records[i - 1].t);
  }
  CHECK(a.seed == 77);
  CHECK(run(ExperimentConfig::on_z_axis(20.0, 0.0, 0.0), 100.0, kDefaultStep, 1).records.empty());
  CHECK_THROWS_AS(run(cfg, 0.0, kDefaultStep, 1), std::invalid_argument);
}

TEST_CASE("a click empties the doubly excited level") {
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.3, 0.3);
  const TrajectoryEngine engine(cfg, kDefaultStep);
  Rng rng(35);
  TrajectoryState state{s11, 0.0};
  int clicks = 0;
  while (clicks < 200) {
    if (engine.step(state, rng)) {
      CHECK(std::abs(state.psi[k22]) == 0.0);
      ++clicks;
    }
    CHECK(state.psi.is_normalized());
  }
}

TEST_CASE("long-run click rate and step robustness") {
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.3, 0.3);
  const double duration = 1e5;
  const double burn_in = 20.0;
  auto count = [&](double dt, std::uint64_t seed) {
    const ClickStream s = run(cfg, duration, dt, seed);
    return static_cast<double>(std::count_if(s.records.begin(), s.records.end(),
                                             [&](const ClickRecord& r) { return r.t >= burn_in; }));
  };
  const double expected_rate = 2.0 * 0.09 / 1.18;
  const double n1 = count(kDefaultStep, 3);
  const double window = duration - burn_in;
  // Poisson sigma; the antibunched stream is narrower, so this is conservative.
  CHECK(std::abs(n1 - expected_rate * window) <= 3.0 * std::sqrt(expected_rate * window));

  const double n2 = count(0.5 * kDefaultStep, 3);
  CHECK(std::abs(n2 - n1) / n1 < 0.01);
}

TEST_CASE("first click") {
  const auto cfg = ExperimentConfig::on_z_axis(20.0, 0.0, 0.0);
  Rng rng(36);
  const auto click = first_click(cfg, s22, kDefaultStep, 100.0, rng);
  REQUIRE(click.has_value());
  CHECK(click->t > 0.0);
  CHECK_FALSE(first_click(cfg, s11, kDefaultStep, 10.0, rng).has_value());
}
