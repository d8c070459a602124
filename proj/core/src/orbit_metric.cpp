#include "orbitqsl/orbit_metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace orbitqsl {

Complex transition_amplitude(const DensityMatrix& rho, const ComplexMatrix& u,
                             const Tolerances& tol) {
  require_same_dim(rho.matrix(), u, "state and unitary");
  require_unitary(u, tol, "orbit unitary");
  return (rho.matrix() * u).trace();
}

PhaseVisibility visibility_phase(const DensityMatrix& rho, const ComplexMatrix& u,
                                 const Tolerances& tol) {
  const Complex z = transition_amplitude(rho, u, tol);
  const double modulus = std::abs(z);
  PhaseVisibility out;
  out.visibility = std::clamp(modulus, 0.0, 1.0);
  out.phase = modulus < 1e-14 ? 0.0 : std::arg(z);
  // std::arg returns [-pi, pi]; fold -pi onto pi.
  if (out.phase <= -std::numbers::pi) out.phase = std::numbers::pi;
  return out;
}

double orbit_distance(const DensityMatrix& rho, const ComplexMatrix& u, const Tolerances& tol) {
  const double v = visibility_phase(rho, u, tol).visibility;
  return 2.0 * std::sqrt(std::max(0.0, 1.0 - v * v));
}

double bargmann_angle_from_visibility(double visibility) {
  return 2.0 * std::acos(std::clamp(visibility, 0.0, 1.0));
}

double bargmann_angle(const DensityMatrix& rho, const ComplexMatrix& u, const Tolerances& tol) {
  return bargmann_angle_from_visibility(visibility_phase(rho, u, tol).visibility);
}

double visibility_deficit(const DensityMatrix& rho, const ComplexMatrix& h, double t, double hbar,
                          const Tolerances& tol) {
  require_same_dim(rho.matrix(), h, "state and Hamiltonian");
  const EigenSystem eig = hermitian_eig(h, tol);
  const Eigen::Index d = eig.values.size();
  RealVector p(d);
  for (Eigen::Index n = 0; n < d; ++n)
    p[n] = std::max(0.0, eig.vectors.col(n).dot(rho.matrix() * eig.vectors.col(n)).real());
  double deficit = 0.0;
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index n = m + 1; n < d; ++n) {
      const double s = std::sin((eig.values[m] - eig.values[n]) * t / (2.0 * hbar));
      deficit += 4.0 * p[m] * p[n] * s * s;
    }
  return std::clamp(deficit, 0.0, 1.0);
}

double orbit_distance(const DensityMatrix& rho, const ComplexMatrix& h, double t, double hbar,
                      const Tolerances& tol) {
  return 2.0 * std::sqrt(visibility_deficit(rho, h, t, hbar, tol));
}

double bargmann_angle(const DensityMatrix& rho, const ComplexMatrix& h, double t, double hbar,
                      const Tolerances& tol) {
  return 2.0 * std::asin(std::sqrt(visibility_deficit(rho, h, t, hbar, tol)));
}

double energy_uncertainty(const DensityMatrix& rho, const ComplexMatrix& h, const Tolerances& tol) {
  require_same_dim(rho.matrix(), h, "state and Hamiltonian");
  require_hermitian(h, tol, "Hamiltonian");
  const ComplexMatrix rh = rho.matrix() * h;
  const double mean = rh.trace().real();
  const double second = (rh * h).trace().real();
  return std::sqrt(std::max(0.0, second - mean * mean));
}

double quantum_speed(const DensityMatrix& rho, const ComplexMatrix& h, double hbar,
                     const Tolerances& tol) {
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
  return 2.0 * energy_uncertainty(rho, h, tol) / hbar;
}

double path_length(const DensityMatrix& rho0, const HamiltonianSchedule& schedule, double t1,
                   double t2, const Tolerances& tol) {
  if (!(t2 > t1)) throw Error(ErrorKind::InvalidArgument, "path_length needs t2 > t1");
  const double hbar = schedule.hbar();
  if (schedule.is_constant()) {
    return quantum_speed(rho0, schedule.constant_hamiltonian(), hbar, tol) * (t2 - t1);
  }
  const std::vector<double> pts = schedule.grid(t1, t2);
  DensityMatrix rho = rho0;
  double total = 0.0;
  double left = quantum_speed(rho, schedule.at(pts.front()), hbar, tol);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    const double m = 0.5 * (a + b);
    const ComplexMatrix h_mid = schedule.at(m);
    const EigenSystem eig = hermitian_eig(h_mid, tol);
    const DensityMatrix rho_mid = rho.evolved(propagator(eig, m - a, hbar), tol);
    rho = rho_mid.evolved(propagator(eig, b - m, hbar), tol);
    const double mid = quantum_speed(rho_mid, h_mid, hbar, tol);
    const double right = quantum_speed(rho, schedule.at(b), hbar, tol);
    total += (b - a) / 6.0 * (left + 4.0 * mid + right);
    left = right;
  }
  return total;
}

}  // namespace orbitqsl
