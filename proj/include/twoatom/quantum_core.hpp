#pragma once

// Two-atom Hilbert space primitives.
//
// Basis ordering is |11>, |12>, |21>, |22> where the first label belongs to
// atom 1 (slowest varying index) and 1 = ground, 2 = excited. Single-atom
// operators use the basis {|1>, |2>}.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace twoatom {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Tolerance for "normalized" states entering emission and trajectory code.
inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;

/// Raised when a value violates the invariants of its type.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Level { ground = 1, excited = 2 };
enum class Atom { first = 1, second = 2 };

/// Index of |a1 a2> in the two-atom basis.
constexpr std::size_t basis_index(Level atom1, Level atom2) {
  return 2 * (static_cast<std::size_t>(atom1) - 1) +
         (static_cast<std::size_t>(atom2) - 1);
}

inline constexpr std::size_t k11 = basis_index(Level::ground, Level::ground);
inline constexpr std::size_t k12 = basis_index(Level::ground, Level::excited);
inline constexpr std::size_t k21 = basis_index(Level::excited, Level::ground);
inline constexpr std::size_t k22 = basis_index(Level::excited, Level::excited);

/// Pure two-atom state. May be unnormalized (e.g. the image of a lowering
/// operator); operations that need a normalized input check it themselves.
class PureState4 {
 public:
  PureState4() : amp_(Eigen::Vector4cd::Zero()) {}
  explicit PureState4(const Eigen::Vector4cd& amplitudes) : amp_(amplitudes) {}
  PureState4(cplx a11, cplx a12, cplx a21, cplx a22) : amp_(a11, a12, a21, a22) {}

  static PureState4 basis(Level atom1, Level atom2) {
    PureState4 s;
    s.amp_[static_cast<Eigen::Index>(basis_index(atom1, atom2))] = 1.0;
    return s;
  }

  const Eigen::Vector4cd& amplitudes() const { return amp_; }
  cplx operator[](std::size_t i) const { return amp_[static_cast<Eigen::Index>(i)]; }

  double norm_squared() const { return amp_.squaredNorm(); }
  bool is_normalized(double tol = kNormTolerance) const {
    return std::abs(norm_squared() - 1.0) <= tol;
  }
  /// Throws InvariantError for the zero vector.
  PureState4 normalized() const;

  friend PureState4 operator+(const PureState4& a, const PureState4& b) {
    return PureState4(Eigen::Vector4cd(a.amp_ + b.amp_));
  }
  friend PureState4 operator-(const PureState4& a, const PureState4& b) {
    return PureState4(Eigen::Vector4cd(a.amp_ - b.amp_));
  }
  friend PureState4 operator*(cplx c, const PureState4& s) {
    return PureState4(Eigen::Vector4cd(c * s.amp_));
  }

 private:
  Eigen::Vector4cd amp_;
};

/// 2x2 density operator of one atom in {|1>, |2>}.
class SingleAtomDensity {
 public:
  /// Validates Hermiticity, unit trace and positivity.
  explicit SingleAtomDensity(const Eigen::Matrix2cd& m);

  static SingleAtomDensity ground();
  static SingleAtomDensity excited();
  static SingleAtomDensity maximally_mixed();

  const Eigen::Matrix2cd& matrix() const { return m_; }
  cplx operator()(Level bra, Level ket) const {
    return m_(static_cast<int>(bra) - 1, static_cast<int>(ket) - 1);
  }

 private:
  Eigen::Matrix2cd m_;
};

/// 4x4 two-atom density operator. Construction validates the physical
/// invariants (Hermitian, trace one, positive semidefinite).
class DensityMatrix4 {
 public:
  explicit DensityMatrix4(const Eigen::Matrix4cd& m);

  const Eigen::Matrix4cd& matrix() const { return m_; }
  cplx operator()(std::size_t bra, std::size_t ket) const {
    return m_(static_cast<Eigen::Index>(bra), static_cast<Eigen::Index>(ket));
  }

 private:
  Eigen::Matrix4cd m_;
};

/// Describes the first violated density-matrix invariant, or an empty string.
std::string density_invariant_violation(const Eigen::MatrixXcd& m);

/// S_i^- |psi>. Linear, nilpotent of order two.
PureState4 apply_lowering(const PureState4& state, Atom atom);

/// <a|b>, conjugate-linear in the first argument.
cplx inner(const PureState4& a, const PureState4& b);

/// Kronecker product, atom 1 as the left factor.
DensityMatrix4 tensor(const SingleAtomDensity& atom1, const SingleAtomDensity& atom2);

/// |psi><psi| for a normalized psi.
DensityMatrix4 dm_from_pure(const PureState4& psi);

}  // namespace twoatom
