#pragma once

#include "orbitqsl/numerics.hpp"
#include "orbitqsl/states.hpp"

namespace orbitqsl {

/// Modulus and argument of Tr(rho U): fringe contrast and fringe shift.
struct PhaseVisibility {
  double visibility = 1.0;  // [0, 1]
  double phase = 0.0;       // (-pi, pi]; 0 when visibility < 1e-14
};

/// A state on the unitary orbit of an origin state, together with the unitary that reached it.
struct OrbitPoint {
  DensityMatrix rho;
  ComplexMatrix unitary;
};

/// Tr(rho U) without clamping. Checks dimensions and unitarity.
Complex transition_amplitude(const DensityMatrix& rho, const ComplexMatrix& u,
                             const Tolerances& tol = kDefaultTolerances);

PhaseVisibility visibility_phase(const DensityMatrix& rho, const ComplexMatrix& u,
                                 const Tolerances& tol = kDefaultTolerances);

/// D = 2 sqrt(1 - V^2): the operation-dependent distance between rho and U rho U^dagger along U.
double orbit_distance(const DensityMatrix& rho, const ComplexMatrix& u,
                      const Tolerances& tol = kDefaultTolerances);

/// s0 = 2 arccos V, in [0, pi].
double bargmann_angle(const DensityMatrix& rho, const ComplexMatrix& u,
                      const Tolerances& tol = kDefaultTolerances);
double bargmann_angle_from_visibility(double visibility);

/// 1 - V^2 for U = exp(-iHt/hbar), summed as sum_{m,n} p_m p_n 2 sin^2((E_m - E_n) t / 2 hbar)
/// over the populations p_n of rho in the eigenbasis of H. Every term is nonnegative, so
/// short times keep full relative precision where 1 - |Tr(rho U)|^2 would cancel.
double visibility_deficit(const DensityMatrix& rho, const ComplexMatrix& h, double t,
                          double hbar = 1.0, const Tolerances& tol = kDefaultTolerances);

/// Same quantities as above for U = exp(-iHt/hbar), computed from visibility_deficit.
double orbit_distance(const DensityMatrix& rho, const ComplexMatrix& h, double t, double hbar = 1.0,
                      const Tolerances& tol = kDefaultTolerances);
double bargmann_angle(const DensityMatrix& rho, const ComplexMatrix& h, double t, double hbar = 1.0,
                      const Tolerances& tol = kDefaultTolerances);

/// Energy uncertainty sqrt(Tr(rho H^2) - Tr(rho H)^2).
double energy_uncertainty(const DensityMatrix& rho, const ComplexMatrix& h,
                          const Tolerances& tol = kDefaultTolerances);

/// v = 2 dH / hbar.
double quantum_speed(const DensityMatrix& rho, const ComplexMatrix& h, double hbar = 1.0,
                     const Tolerances& tol = kDefaultTolerances);

/// Total orbit length (2/hbar) * integral of dH over [t1, t2].
///
/// Constant schedules return v * (t2 - t1). Sampled schedules are integrated with
/// one Simpson panel per grid interval; the state is carried across each interval with
/// the midpoint Hamiltonian and dH is evaluated with the instantaneous Hamiltonian.
double path_length(const DensityMatrix& rho0, const HamiltonianSchedule& schedule, double t1,
                   double t2, const Tolerances& tol = kDefaultTolerances);

}  // namespace orbitqsl
