#include "orbitqsl/speed_limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace orbitqsl {

namespace {

constexpr double kTiny = 1e-14;

// Time average of dH over [0, T] for the schedule, evaluated from rho(0).
double mean_energy_uncertainty(const DensityMatrix& rho, const HamiltonianSchedule& schedule,
                               double T, const Tolerances& tol) {
  if (schedule.is_constant()) return energy_uncertainty(rho, schedule.constant_hamiltonian(), tol);
  return path_length(rho, schedule, 0.0, T, tol) * schedule.hbar() / (2.0 * T);
}

double angle_over_speed(double angle, double visibility, double delta_h, double hbar) {
  if (delta_h < kTiny) return 1.0 - visibility < 1e-12 ? 0.0 : kInfiniteBound;
  if (angle == 0.0) return 0.0;
  return hbar * angle / (2.0 * delta_h);
}

void require_time(double T) {
  if (!(T >= 0.0) || !std::isfinite(T)) {
    throw Error(ErrorKind::InvalidArgument, "evolution time must be finite and non-negative");
  }
}

}  // namespace

double EnergyDistribution::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < energies.size(); ++n) m += probs[n] * energies[n];
  return m;
}

double EnergyDistribution::mean_abs() const {
  double m = 0.0;
  for (std::size_t n = 0; n < energies.size(); ++n) m += probs[n] * std::abs(energies[n]);
  return m;
}

Complex EnergyDistribution::characteristic(double t, double hbar) const {
  Complex z = 0.0;
  for (std::size_t n = 0; n < energies.size(); ++n) {
    z += probs[n] * std::exp(Complex(0.0, -energies[n] * t / hbar));
  }
  return z;
}

EnergyDistribution energy_distribution(const DensityMatrix& rho, const ComplexMatrix& h,
                                       const Tolerances& tol) {
  require_same_dim(rho.matrix(), h, "state and Hamiltonian");
  const EigenSystem eig = hermitian_eig(h, tol);
  EnergyDistribution dist;
  Eigen::Index k = 0;
  const Eigen::Index d = eig.values.size();
  while (k < d) {
    const double anchor = eig.values[k];
    double energy_sum = 0.0;
    double p = 0.0;
    Eigen::Index count = 0;
    for (; k < d && eig.values[k] - anchor <= tol.degeneracy; ++k, ++count) {
      const ComplexVector col = eig.vectors.col(k);
      p += (col.adjoint() * rho.matrix() * col)(0, 0).real();
      energy_sum += eig.values[k];
    }
    dist.energies.push_back(energy_sum / static_cast<double>(count));
    dist.probs.push_back(std::max(0.0, p));
  }
  return dist;
}

bool is_psd(const ComplexMatrix& h, const Tolerances& tol) {
  return hermitian_eig(h, tol).values[0] >= -tol.psd;
}

double mt_bound(const DensityMatrix& rho, const HamiltonianSchedule& schedule, double T,
                const Tolerances& tol) {
  require_time(T);
  if (T == 0.0) return 0.0;
  const ComplexMatrix u = schedule.evolution(0.0, T, tol);
  const double visibility = visibility_phase(rho, u, tol).visibility;
  const double s0 = schedule.is_constant()
                        ? bargmann_angle(rho, schedule.constant_hamiltonian(), T, schedule.hbar(), tol)
                        : bargmann_angle_from_visibility(visibility);
  const double delta_h = mean_energy_uncertainty(rho, schedule, T, tol);
  return angle_over_speed(s0, visibility, delta_h, schedule.hbar());
}

double ml_bound(const DensityMatrix& rho, const ComplexMatrix& h, double T, double hbar,
                const Tolerances& tol) {
  require_time(T);
  require_same_dim(rho.matrix(), h, "state and Hamiltonian");
  if (!is_psd(h, tol)) {
    throw Error(ErrorKind::NotPSD, "mean-energy bound requires a positive semidefinite Hamiltonian");
  }
  const double mean = (rho.matrix() * h).trace().real();
  if (mean < kTiny) throw Error(ErrorKind::ZeroMeanEnergy, "<H> vanishes in this state");
  const Complex z = transition_amplitude(rho, propagator(h, T, hbar, tol), tol);
  const double pi = std::numbers::pi;
  return std::max(0.0, pi * hbar / (2.0 * mean) * (1.0 - z.real() + (2.0 / pi) * z.imag()));
}

double weighted_median(const EnergyDistribution& dist) {
  if (dist.energies.empty()) throw Error(ErrorKind::InvalidArgument, "empty energy distribution");
  double cumulative = 0.0;
  for (std::size_t n = 0; n < dist.energies.size(); ++n) {
    cumulative += dist.probs[n];
    if (cumulative >= 0.5 - 1e-12) return dist.energies[n];
  }
  return dist.energies.back();
}

double aadm(const EnergyDistribution& dist) {
  const double median = weighted_median(dist);
  double total = 0.0;
  for (std::size_t n = 0; n < dist.energies.size(); ++n) {
    total += dist.probs[n] * std::abs(dist.energies[n] - median);
  }
  return total;
}

double chau_bound(const DensityMatrix& rho, const ComplexMatrix& h, double T, double hbar,
                  const BoundOptions& opts) {
  require_time(T);
  if (!is_psd(h, opts.tol)) {
    throw Error(ErrorKind::NotPSD, "Chau bound with <E> requires a positive semidefinite Hamiltonian");
  }
  const double mean_abs = energy_distribution(rho, h, opts.tol).mean_abs();
  if (mean_abs < kTiny) throw Error(ErrorKind::ZeroMeanEnergy, "<E> vanishes in this state");
  const double v = visibility_phase(rho, propagator(h, T, hbar, opts.tol), opts.tol).visibility;
  return (1.0 - v) * hbar / (opts.chau_a * mean_abs);
}

double improved_chau_bound(const DensityMatrix& rho, const ComplexMatrix& h, double T,
                           double hbar, const BoundOptions& opts) {
  require_time(T);
  const double spread = aadm(energy_distribution(rho, h, opts.tol));
  if (spread < kTiny) {
    throw Error(ErrorKind::DegenerateSpectrum, "energy distribution has zero median deviation");
  }
  const double v = visibility_phase(rho, propagator(h, T, hbar, opts.tol), opts.tol).visibility;
  return hbar * (1.0 - v) / (opts.chau_a * spread);
}

ChauBounds chau_bounds(const DensityMatrix& rho, const ComplexMatrix& h, double T, double hbar,
                       const BoundOptions& opts) {
  ChauBounds out;
  try {
    out.chau = chau_bound(rho, h, T, hbar, opts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotPSD && e.kind() != ErrorKind::ZeroMeanEnergy) throw;
    out.chau_reason = e.what();
  }
  try {
    out.improved = improved_chau_bound(rho, h, T, hbar, opts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateSpectrum) throw;
    out.improved_reason = e.what();
  }
  return out;
}

double uhlmann_fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2,
                        const Tolerances& tol) {
  require_same_dim(rho1.matrix(), rho2.matrix(), "fidelity operands");
  // Overlap form for pure arguments; square roots of rank-deficient matrices
  // otherwise inject sqrt(eps) noise into the trace.
  auto overlap = [&](const DensityMatrix& pure, const DensityMatrix& other) {
    const EigenSystem eig = hermitian_eig(pure.matrix(), tol);
    const ComplexVector psi = eig.vectors.col(eig.values.size() - 1);
    const double p = (psi.adjoint() * other.matrix() * psi)(0, 0).real();
    return std::sqrt(std::clamp(p, 0.0, 1.0));
  };
  if (rho1.is_pure()) return overlap(rho1, rho2);
  if (rho2.is_pure()) return overlap(rho2, rho1);
  const ComplexMatrix s = sqrt_psd(rho1.matrix(), tol);
  const ComplexMatrix inner = hermitian_part(s * rho2.matrix() * s);
  return std::clamp(sqrt_psd(inner, tol).trace().real(), 0.0, 1.0);
}

double bures_angle(const DensityMatrix& rho1, const DensityMatrix& rho2, const Tolerances& tol) {
  return 2.0 * std::acos(uhlmann_fidelity(rho1, rho2, tol));
}

double bures_baseline_bound(const DensityMatrix& rho, const HamiltonianSchedule& schedule,
                            double T, const Tolerances& tol) {
  require_time(T);
  if (T == 0.0) return 0.0;
  const DensityMatrix final_state = rho.evolved(schedule.evolution(0.0, T, tol), tol);
  const double fidelity = uhlmann_fidelity(rho, final_state, tol);
  const double angle = 2.0 * std::acos(fidelity);
  const double delta_h = mean_energy_uncertainty(rho, schedule, T, tol);
  return angle_over_speed(angle, fidelity, delta_h, schedule.hbar());
}

BoundReport bound_report(const DensityMatrix& rho, const HamiltonianSchedule& schedule, double T,
                         const BoundOptions& opts) {
  require_time(T);
  const Tolerances& tol = opts.tol;
  const double hbar = schedule.hbar();
  BoundReport r;
  r.T = T;
  r.hbar = hbar;
  r.time_dependent = !schedule.is_constant();

  const ComplexMatrix u = T == 0.0 ? identity(rho.dim()) : schedule.evolution(0.0, T, tol);
  const Complex z = transition_amplitude(rho, u, tol);
  const PhaseVisibility pv = visibility_phase(rho, u, tol);
  r.visibility = pv.visibility;
  r.phase = pv.phase;
  r.re_part = z.real();
  r.im_part = z.imag();
  r.bargmann_angle = schedule.is_constant()
                         ? bargmann_angle(rho, schedule.constant_hamiltonian(), T, hbar, tol)
                         : bargmann_angle_from_visibility(pv.visibility);
  r.fidelity = uhlmann_fidelity(rho, rho.evolved(u, tol), tol);
  r.bures_angle = 2.0 * std::acos(r.fidelity);

  const ComplexMatrix h0 = schedule.at(0.0);
  r.mean_H = (rho.matrix() * h0).trace().real();
  r.delta_H = T == 0.0 ? energy_uncertainty(rho, h0, tol)
                       : mean_energy_uncertainty(rho, schedule, T, tol);
  const EnergyDistribution dist = energy_distribution(rho, h0, tol);
  r.mean_abs_E = dist.mean_abs();
  r.E_DE = aadm(dist);
  r.h_psd = schedule.is_constant() && is_psd(h0, tol);

  r.mt_bound = angle_over_speed(r.bargmann_angle, r.visibility, r.delta_H, hbar);
  if (T == 0.0) r.mt_bound = 0.0;
  if (std::isinf(*r.mt_bound)) r.reasons["mt_bound"] = "zero energy uncertainty with s0 > 0";
  r.bures_baseline_bound = angle_over_speed(r.bures_angle, r.fidelity, r.delta_H, hbar);
  if (T == 0.0) r.bures_baseline_bound = 0.0;
  r.reasons["bures_baseline_bound"] =
      "comparison only: Bures-angle analogue hbar*Theta_B/(2*dH) of the MT-type bound";

  if (!schedule.is_constant()) {
    const std::string why = "requires a time-independent Hamiltonian";
    r.reasons["ml_bound"] = why;
    r.reasons["chau_bound"] = why;
    r.reasons["improved_chau_bound"] = why;
    r.combined_bound = r.mt_bound;
    return r;
  }

  if (!r.h_psd) {
    r.reasons["ml_bound"] = "Hamiltonian is not positive semidefinite";
  } else if (r.mean_H < kTiny) {
    r.reasons["ml_bound"] = "zero mean energy";
  } else {
    const double pi = std::numbers::pi;
    r.ml_bound = std::max(0.0, pi * hbar / (2.0 * r.mean_H) * (1.0 - r.re_part + (2.0 / pi) * r.im_part));
  }
  r.combined_bound = r.ml_bound ? std::max(*r.mt_bound, *r.ml_bound) : *r.mt_bound;

  const ChauBounds chau = chau_bounds(rho, h0, T, hbar, opts);
  r.chau_bound = chau.chau;
  r.improved_chau_bound = chau.improved;
  if (!chau.chau) r.reasons["chau_bound"] = chau.chau_reason;
  if (!chau.improved) r.reasons["improved_chau_bound"] = chau.improved_reason;
  return r;
}

BoundReport combined_bound(const DensityMatrix& rho, const ComplexMatrix& h, double T,
                           double hbar, const BoundOptions& opts) {
  return bound_report(rho, HamiltonianSchedule::constant(h, hbar, opts.tol), T, opts);
}

}  // namespace orbitqsl
