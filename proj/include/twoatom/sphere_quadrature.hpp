#pragma once

#include <cstddef>
#include <vector>

namespace twoatom {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the three-term recurrence.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(std::size_t n);

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times the
/// uniform (trapezoidal, spectrally accurate for periodic integrands) rule in
/// phi. Exact for spherical harmonics up to degree min(2 n_theta - 1, n_phi - 1).
class SphereQuadrature {
 public:
  static constexpr std::size_t kDefaultTheta = 256;
  static constexpr std::size_t kDefaultPhi = 512;

  explicit SphereQuadrature(std::size_t n_theta = kDefaultTheta,
                            std::size_t n_phi = kDefaultPhi);

  std::size_t n_theta() const { return gl_.nodes.size(); }
  std::size_t n_phi() const { return n_phi_; }

  /// Sums f(cos_theta, phi) * weight over all nodes. F may return any type
  /// closed under + and scalar *, e.g. double or std::complex<double>.
  template <class F>
  auto integrate(F&& f) const {
    using R = decltype(f(0.0, 0.0));
    R total{};
    for (std::size_t i = 0; i < gl_.nodes.size(); ++i) {
      R ring{};
      for (std::size_t j = 0; j < n_phi_; ++j) {
        ring += f(gl_.nodes[i], phi_step_ * static_cast<double>(j));
      }
      total += ring * (gl_.weights[i] * phi_step_);
    }
    return total;
  }

 private:
  GaussLegendre gl_;
  std::size_t n_phi_;
  double phi_step_;
};

}  // namespace twoatom
