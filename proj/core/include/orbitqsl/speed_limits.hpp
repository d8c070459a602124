#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orbitqsl/numerics.hpp"
#include "orbitqsl/orbit_metric.hpp"
#include "orbitqsl/states.hpp"

namespace orbitqsl {

/// Constant of the trigonometric inequality cos x >= 1 - A|x| used by the Chau bounds.
inline constexpr double kChauConstant = 0.725;

inline constexpr double kInfiniteBound = std::numeric_limits<double>::infinity();

/// Populations of the distinct eigenvalues of H in state rho.
struct EnergyDistribution {
  std::vector<double> energies;  // strictly ascending
  std::vector<double> probs;     // >= 0, sum to 1

  double mean() const;
  double mean_abs() const;
  /// sum_n p_n exp(-i E_n t / hbar)
  Complex characteristic(double t, double hbar) const;
};

struct BoundOptions {
  double chau_a = kChauConstant;
  Tolerances tol{};
};

/// Bounds inferred from simulated interferometer data on the same instance.
struct MeasuredSummary {
  double visibility = 0.0;
  double visibility_stderr = 0.0;
  double phase = 0.0;
  double bargmann_angle = 0.0;
  double bargmann_stderr = 0.0;
  double speed = 0.0;
  double speed_stderr = 0.0;
  double tau = 0.0;
  std::uint64_t shots = 0;  // 0 = exact probabilities
  double mt_bound = 0.0;
  double mt_stderr = 0.0;
  std::optional<double> ml_bound;
  std::optional<double> ml_stderr;
};

/// Everything computed for one (rho, H, T) instance.
///
/// Optional bounds are empty when the branch does not apply; the reason is in
/// `reasons` under the bound's field name. Infinite values mean the generator
/// produces no first-order motion while the endpoints differ.
struct BoundReport {
  double T = 0.0;
  double hbar = 1.0;
  double visibility = 1.0;
  double phase = 0.0;
  double bargmann_angle = 0.0;
  double bures_angle = 0.0;
  double fidelity = 1.0;
  double delta_H = 0.0;
  double mean_H = 0.0;
  double mean_abs_E = 0.0;
  double re_part = 1.0;
  double im_part = 0.0;
  double E_DE = 0.0;
  bool h_psd = false;
  bool time_dependent = false;

  std::optional<double> mt_bound;
  std::optional<double> ml_bound;
  std::optional<double> combined_bound;
  std::optional<double> chau_bound;
  std::optional<double> improved_chau_bound;
  std::optional<double> bures_baseline_bound;

  std::map<std::string, std::string> reasons;
  std::optional<MeasuredSummary> measured;
};

/// p_n = Tr(Pi_n rho) over the spectral projectors of H; eigenvalues within
/// tol.degeneracy of the first member of a cluster are merged.
EnergyDistribution energy_distribution(const DensityMatrix& rho, const ComplexMatrix& h,
                                       const Tolerances& tol = kDefaultTolerances);

bool is_psd(const ComplexMatrix& h, const Tolerances& tol = kDefaultTolerances);

/// hbar s0 / (2 dH) with dH the time average of the energy uncertainty over [0, T].
/// Constant Hamiltonians use dH in rho(0). Returns 0 when s0 = 0 and
/// kInfiniteBound when dH vanishes but the endpoints differ.
double mt_bound(const DensityMatrix& rho, const HamiltonianSchedule& schedule, double T,
                const Tolerances& tol = kDefaultTolerances);

/// Mean-energy bound max(0, (pi hbar / 2<H>) (1 - Re + (2/pi) Im)), Re + i Im = Tr(rho U(T)).
/// Throws NotPSD for Hamiltonians with negative spectrum and ZeroMeanEnergy when <H> ~ 0.
double ml_bound(const DensityMatrix& rho, const ComplexMatrix& h, double T, double hbar = 1.0,
                const Tolerances& tol = kDefaultTolerances);

/// Smallest energy whose cumulative probability reaches one half.
double weighted_median(const EnergyDistribution& dist);

/// Average absolute deviation from the weighted median.
double aadm(const EnergyDistribution& dist);

/// (1 - V) hbar / (A sum_n p_n |E_n|). Needs a PSD Hamiltonian with nonzero mean energy.
double chau_bound(const DensityMatrix& rho, const ComplexMatrix& h, double T, double hbar = 1.0,
                  const BoundOptions& opts = {});

/// hbar (1 - V) / (A E_DE). Throws DegenerateSpectrum when E_DE < 1e-14.
double improved_chau_bound(const DensityMatrix& rho, const ComplexMatrix& h, double T,
                           double hbar = 1.0, const BoundOptions& opts = {});

struct ChauBounds {
  std::optional<double> chau;
  std::optional<double> improved;
  std::string chau_reason;
  std::string improved_reason;
};

ChauBounds chau_bounds(const DensityMatrix& rho, const ComplexMatrix& h, double T,
                       double hbar = 1.0, const BoundOptions& opts = {});

/// Root fidelity Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)). When either state is pure the
/// overlap form sqrt(<psi| rho |psi>) is used.
double uhlmann_fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2,
                        const Tolerances& tol = kDefaultTolerances);

/// 2 arccos of the root fidelity, in [0, pi].
double bures_angle(const DensityMatrix& rho1, const DensityMatrix& rho2,
                   const Tolerances& tol = kDefaultTolerances);

/// Comparator: hbar Theta_B(rho(0), rho(T)) / (2 dH), same time-averaged dH as mt_bound.
double bures_baseline_bound(const DensityMatrix& rho, const HamiltonianSchedule& schedule,
                            double T, const Tolerances& tol = kDefaultTolerances);

/// Full report for a constant Hamiltonian. combined = max(mt, ml) when H is PSD, mt otherwise.
BoundReport combined_bound(const DensityMatrix& rho, const ComplexMatrix& h, double T,
                           double hbar = 1.0, const BoundOptions& opts = {});

/// Report for any schedule. Sampled schedules only carry the MT and Bures-baseline branches.
BoundReport bound_report(const DensityMatrix& rho, const HamiltonianSchedule& schedule, double T,
                         const BoundOptions& opts = {});

}  // namespace orbitqsl
