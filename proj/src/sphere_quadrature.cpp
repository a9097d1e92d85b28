#include "twoatom/sphere_quadrature.hpp"

#include "twoatom/quantum_core.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace twoatom {

GaussLegendre gauss_legendre(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("gauss_legendre: need at least one node");
  }
  const int order = static_cast<int>(n);
  // Non-negative zeros of P_n in ascending order, starting at 0 for odd n.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(order);
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t m = 0; m < zeros.size(); ++m) {
    const double x = zeros[zeros.size() - 1 - m];
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[m] = x;
    rule.nodes[n - 1 - m] = -x;
    rule.weights[m] = w;
    rule.weights[n - 1 - m] = w;
  }
  return rule;
}

SphereQuadrature::SphereQuadrature(std::size_t n_theta, std::size_t n_phi)
    : gl_(gauss_legendre(n_theta)), n_phi_(n_phi) {
  if (n_phi == 0) {
    throw std::invalid_argument("SphereQuadrature: n_phi must be positive");
  }
  phi_step_ = 2.0 * kPi / static_cast<double>(n_phi);
}

}  // namespace twoatom
