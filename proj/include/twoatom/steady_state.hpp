#pragma once

// Steady state of two independently driven, independently decaying atoms.
//
// Laser coupling convention (rotating frame, resonant):
//
//     H_L = (1/2) sum_i (conj(Omega_i) S_i^+ + Omega_i S_i^-)
//
// With this sign the single-atom coherence is <1|rho|2> = i Omega A / D and
// <12|rho_ss|21> = Omega_1 conj(Omega_2) A^2 / (D_1 D_2), D = A^2 + 2|Omega|^2,
// which makes the mixed-state density reproduce the closed-form steady
// pattern, including the phase of its interference term.

#include "twoatom/emission_law.hpp"
#include "twoatom/quantum_core.hpp"

#include <cstddef>
#include <functional>

namespace twoatom {

enum class SteadyMethod { closed_form_product, time_integration };

struct SteadyStateSolution {
  DensityMatrix4 rho;
  double residual;  // max |master_rhs(rho)| entry
  SteadyMethod method;
};

/// Resonant single-atom steady state: excited population |Omega|^2 / D and
/// coherence <1|rho|2> = i Omega A / D. Throws std::invalid_argument for A <= 0.
SingleAtomDensity single_atom_steady(cplx rabi, double decay_rate);

/// Excited population of the single-atom steady state.
double steady_excited_population(cplx rabi, double decay_rate);

using SingleAtomSteadyFn = std::function<SingleAtomDensity(cplx, double)>;

/// Product of the single-atom steady states; residual evaluated against
/// master_rhs. The optional factor function exists for self-test fault
/// injection.
SteadyStateSolution two_atom_steady(const ExperimentConfig& cfg,
                                    const SingleAtomSteadyFn& factor = single_atom_steady);

/// d rho / dt = -i [H_L, rho] + A sum_i (S_i^- rho S_i^+ - {S_i^+ S_i^-, rho}/2)
Eigen::Matrix4cd master_rhs(const Eigen::Matrix4cd& rho, const ExperimentConfig& cfg);

struct IntegratorOptions {
  std::size_t max_steps = 2'000'000;
  double abs_tolerance = 1e-14;
  double rel_tolerance = 1e-12;
  double initial_step = 0.01;  // units of 1/A
};

/// Raised when time integration does not reach the requested residual.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrates the master equation from |11><11| with an adaptive
/// Dormand-Prince stepper until max |d rho/dt| < tol.
SteadyStateSolution time_integrate_to_steady(const ExperimentConfig& cfg, double tol,
                                             const IntegratorOptions& options = {});

/// Closed-form steady emission density per unit solid angle.
double steady_emission_density(const ExperimentConfig& cfg, const Direction& k_hat);

/// Fringe visibility of the steady pattern along a line of constant dipole
/// factor: 2 A^2 |Omega_1 Omega_2| / (4|Omega_1|^2|Omega_2|^2 + A^2(|Omega_1|^2 + |Omega_2|^2)).
/// Zero when either drive is off.
double steady_fringe_visibility(const ExperimentConfig& cfg);

/// Sphere-integrated steady click rate, A (p_1 + p_2) + interference
/// correction weighted by cross_term_gamma.
double steady_total_rate(const ExperimentConfig& cfg);

}  // namespace twoatom
