#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "twoatom/quantum_core.hpp"

using namespace twoatom;

namespace {

const PureState4 s11 = PureState4::basis(Level::ground, Level::ground);
const PureState4 s12 = PureState4::basis(Level::ground, Level::excited);
const PureState4 s21 = PureState4::basis(Level::excited, Level::ground);
const PureState4 s22 = PureState4::basis(Level::excited, Level::excited);

double distance(const PureState4& a, const PureState4& b) {
  return (a.amplitudes() - b.amplitudes()).norm();
}

SingleAtomDensity projector(Level l) {
  return l == Level::ground ? SingleAtomDensity::ground() : SingleAtomDensity::excited();
}

}  // namespace

TEST_CASE("basis ordering puts atom 1 on the left") {
  CHECK(k11 == 0);
  CHECK(k12 == 1);
  CHECK(k21 == 2);
  CHECK(k22 == 3);
  CHECK(s21[2] == cplx(1.0));
}

TEST_CASE("lowering acts on the named atom") {
  CHECK(distance(apply_lowering(s21, Atom::first), s11) == 0.0);
  CHECK(apply_lowering(s11, Atom::first).norm_squared() == 0.0);
  CHECK(apply_lowering(s12, Atom::first).norm_squared() == 0.0);
  CHECK(distance(apply_lowering(s22, Atom::first), s12) == 0.0);
  CHECK(distance(apply_lowering(s12, Atom::second), s11) == 0.0);
  CHECK(distance(apply_lowering(s22, Atom::second), s21) == 0.0);

  const cplx al(0.3, 0.1);
  const cplx be(-0.2, 0.7);
  const cplx ga(0.5, -0.4);
  const PureState4 psi = al * s12 + be * s21 + ga * s22;
  CHECK(distance(apply_lowering(psi, Atom::second), al * s11 + ga * s21) < 1e-15);
}

TEST_CASE("lowering is nilpotent and the two atoms commute") {
  Rng rng(1);
  for (int n = 0; n < 200; ++n) {
    const PureState4 psi = oracle::random_state(rng);
    for (Atom a : {Atom::first, Atom::second}) {
      CHECK(apply_lowering(apply_lowering(psi, a), a).norm_squared() == 0.0);
    }
    const PureState4 x = apply_lowering(apply_lowering(psi, Atom::first), Atom::second);
    const PureState4 y = apply_lowering(apply_lowering(psi, Atom::second), Atom::first);
    CHECK(distance(x, y) <= 1e-15);
  }
}

TEST_CASE("inner product") {
  CHECK(inner(s12, s12) == cplx(1.0));
  CHECK(inner(s12, s21) == cplx(0.0));
  const PureState4 bell = (1.0 / std::sqrt(2.0)) * (s12 + s21);
  CHECK(std::abs(inner(bell, s21) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(inner(cplx(0.0, 1.0) * s12, s12) == cplx(0.0, -1.0));

  Rng rng(2);
  for (int n = 0; n < 200; ++n) {
    const PureState4 a = oracle::random_state(rng);
    const PureState4 b = oracle::random_state(rng);
    CHECK(std::abs(inner(a, b) - std::conj(inner(b, a))) <= 1e-15);
    CHECK(inner(a, a).imag() == 0.0);
    CHECK(inner(a, a).real() >= 0.0);
  }
}

TEST_CASE("tensor follows the basis ordering") {
  for (Level x : {Level::ground, Level::excited}) {
    for (Level y : {Level::ground, Level::excited}) {
      const DensityMatrix4 rho = tensor(projector(x), projector(y));
      const auto i = static_cast<Eigen::Index>(basis_index(x, y));
      Eigen::Matrix4cd expected = Eigen::Matrix4cd::Zero();
      expected(i, i) = 1.0;
      CHECK((rho.matrix() - expected).norm() == 0.0);
    }
  }
  const DensityMatrix4 mixed =
      tensor(SingleAtomDensity::maximally_mixed(), SingleAtomDensity::maximally_mixed());
  CHECK((mixed.matrix() - 0.25 * Eigen::Matrix4cd::Identity()).norm() < 1e-15);
}

TEST_CASE("dm_from_pure") {
  const DensityMatrix4 r22 = dm_from_pure(s22);
  CHECK(r22(k22, k22) == cplx(1.0));
  CHECK(r22.matrix().cwiseAbs().sum() == doctest::Approx(1.0));

  const PureState4 bell = (1.0 / std::sqrt(2.0)) * (s12 + s21);
  const DensityMatrix4 rb = dm_from_pure(bell);
  for (std::size_t i : {k12, k21}) {
    for (std::size_t j : {k12, k21}) {
      CHECK(std::abs(rb(i, j) - 0.5) < 1e-15);
    }
  }
  CHECK(std::abs(rb(k11, k11)) == 0.0);

  Rng rng(3);
  for (int n = 0; n < 100; ++n) {
    const DensityMatrix4 rho = dm_from_pure(oracle::random_state(rng));
    CHECK(density_invariant_violation(rho.matrix()).empty());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho.matrix());
    const auto ev = es.eigenvalues();
    CHECK(ev(3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(ev(0)) < 1e-12);
    CHECK(std::abs(ev(1)) < 1e-12);
    CHECK(std::abs(ev(2)) < 1e-12);
  }
  CHECK_THROWS_AS(dm_from_pure(2.0 * s22), InvariantError);
}

TEST_CASE("density matrix invariants are enforced") {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  CHECK_NOTHROW(DensityMatrix4{m});

  Eigen::Matrix4cd not_hermitian = m;
  not_hermitian(0, 1) = cplx(0.1, 0.0);
  CHECK_THROWS_AS(DensityMatrix4{not_hermitian}, InvariantError);

  Eigen::Matrix4cd bad_trace = m;
  bad_trace(2, 2) = 0.1;
  CHECK_THROWS_AS(DensityMatrix4{bad_trace}, InvariantError);

  Eigen::Matrix4cd negative = Eigen::Matrix4cd::Zero();
  negative(0, 0) = 1.2;
  negative(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix4{negative}, InvariantError);
  CHECK(density_invariant_violation(negative).find("positive") != std::string::npos);

  Eigen::Matrix2cd single;
  single << 0.7, 0.0, 0.0, 0.4;
  CHECK_THROWS_AS(SingleAtomDensity{single}, InvariantError);
}

TEST_CASE("normalization helpers") {
  CHECK(s22.is_normalized());
  CHECK_FALSE((2.0 * s22).is_normalized());
  CHECK((3.0 * s12).normalized()[k12] == cplx(1.0));
  CHECK_THROWS_AS(PureState4().normalized(), InvariantError);
}
