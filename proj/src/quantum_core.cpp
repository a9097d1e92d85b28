#include "twoatom/quantum_core.hpp"

#include <sstream>

namespace twoatom {

PureState4 PureState4::normalized() const {
  const double n2 = norm_squared();
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw InvariantError("cannot normalize a zero or non-finite state");
  }
  return PureState4(Eigen::Vector4cd(amp_ / std::sqrt(n2)));
}

std::string density_invariant_violation(const Eigen::MatrixXcd& m) {
  std::ostringstream why;
  if (!m.allFinite()) {
    return "non-finite entries";
  }
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTolerance) {
    why << "not Hermitian (max |rho - rho^dag| = " << herm << ")";
    return why.str();
  }
  const cplx tr = m.trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    why << "trace " << tr.real() << " differs from 1";
    return why.str();
  }
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -kPsdTolerance) {
    why << "not positive semidefinite (min eigenvalue " << min_eig << ")";
    return why.str();
  }
  return {};
}

SingleAtomDensity::SingleAtomDensity(const Eigen::Matrix2cd& m) : m_(m) {
  if (auto why = density_invariant_violation(m); !why.empty()) {
    throw InvariantError("single-atom density: " + why);
  }
}

SingleAtomDensity SingleAtomDensity::ground() {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0;
  return SingleAtomDensity(m);
}

SingleAtomDensity SingleAtomDensity::excited() {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(1, 1) = 1.0;
  return SingleAtomDensity(m);
}

SingleAtomDensity SingleAtomDensity::maximally_mixed() {
  return SingleAtomDensity(Eigen::Matrix2cd(0.5 * Eigen::Matrix2cd::Identity()));
}

DensityMatrix4::DensityMatrix4(const Eigen::Matrix4cd& m) : m_(m) {
  if (auto why = density_invariant_violation(m); !why.empty()) {
    throw InvariantError("two-atom density: " + why);
  }
}

PureState4 apply_lowering(const PureState4& state, Atom atom) {
  const auto& a = state.amplitudes();
  Eigen::Vector4cd out = Eigen::Vector4cd::Zero();
  if (atom == Atom::first) {
    // |2x> -> |1x>
    out[k11] = a[k21];
    out[k12] = a[k22];
  } else {
    // |x2> -> |x1>
    out[k11] = a[k12];
    out[k21] = a[k22];
  }
  return PureState4(out);
}

cplx inner(const PureState4& a, const PureState4& b) {
  return a.amplitudes().dot(b.amplitudes());
}

DensityMatrix4 tensor(const SingleAtomDensity& atom1, const SingleAtomDensity& atom2) {
  Eigen::Matrix4cd m;
  const auto& x = atom1.matrix();
  const auto& y = atom2.matrix();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      m.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
    }
  }
  return DensityMatrix4(m);
}

DensityMatrix4 dm_from_pure(const PureState4& psi) {
  if (!psi.is_normalized()) {
    throw InvariantError("dm_from_pure requires a normalized state");
  }
  // Tolerance-level renormalization keeps the trace within 1e-12.
  const Eigen::Vector4cd a = psi.normalized().amplitudes();
  return DensityMatrix4(Eigen::Matrix4cd(a * a.adjoint()));
}

}  // namespace twoatom
