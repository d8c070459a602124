#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "orbitqsl/numerics.hpp"
#include "orbitqsl/orbit_metric.hpp"
#include "orbitqsl/speed_limits.hpp"
#include "orbitqsl/states.hpp"

namespace orbitqsl {

/// Shot count meaning "use the exact detector probabilities".
inline constexpr std::uint64_t kExactShots = 0;

/// Detector record of a phase-shifter scan. For exact scans `counts_d` is empty and
/// `frequencies` holds the probabilities themselves.
struct FringeScan {
  std::vector<double> settings;
  std::uint64_t shots_per_setting = kExactShots;
  std::vector<std::uint64_t> counts_d;
  std::vector<double> frequencies;
  std::uint64_t seed = 0;

  bool exact() const noexcept { return shots_per_setting == kExactShots; }
};

struct FringeFit {
  PhaseVisibility estimate;
  double visibility_stderr = 0.0;
  double phase_stderr = 0.0;
  double offset = 0.5;
  bool phase_identifiable = true;
};

struct BargmannEstimate {
  double s0 = 0.0;
  double std_error = 0.0;
  FringeFit fit;
};

struct SpeedEstimate {
  double v_hat = 0.0;
  double tau = 0.0;
  std::optional<double> v_true;
  double std_error = 0.0;
  FringeFit fit;
};

/// `count` equally spaced phase settings on [0, 2 pi).
std::vector<double> default_settings(std::size_t count = 12);

/// Probability at detector D for ideal 50/50 beam splitters:
/// p_D = (1 + V cos(Phi + chi)) / 2 with V e^{i Phi} = Tr(rho U_lower^dagger U_upper).
/// Detector D' receives 1 - p_D.
double detector_probability(const DensityMatrix& rho, const ComplexMatrix& u_upper,
                            const ComplexMatrix& u_lower, double chi,
                            const Tolerances& tol = kDefaultTolerances);

/// Binomial counts at each setting. Setting j draws from its own stream derived from
/// (seed, j), so results do not depend on evaluation order.
FringeScan sample_scan(const DensityMatrix& rho, const ComplexMatrix& u_upper,
                       const ComplexMatrix& u_lower, const std::vector<double>& settings,
                       std::uint64_t shots, std::uint64_t seed,
                       const Tolerances& tol = kDefaultTolerances);

/// Least-squares fit of a + b cos chi + c sin chi to the detector frequencies.
FringeFit fit_fringe(const FringeScan& scan);

/// Interferes rho(0) through U(T) against an idle arm and reads s0 = 2 arccos V.
BargmannEstimate measure_bargmann(const DensityMatrix& rho, const ComplexMatrix& h, double T,
                                  const std::vector<double>& settings, std::uint64_t shots,
                                  std::uint64_t seed, double hbar = 1.0,
                                  const Tolerances& tol = kDefaultTolerances);

/// Interferes U(t) against U(t + tau) and inverts V^2 = 1 - v^2 tau^2 / 4.
/// Keep tau * v <= 0.05 for a truncation error of order 1e-3 or less.
SpeedEstimate measure_speed(const DensityMatrix& rho, const ComplexMatrix& h, double t, double tau,
                            const std::vector<double>& settings, std::uint64_t shots,
                            std::uint64_t seed, double hbar = 1.0,
                            const Tolerances& tol = kDefaultTolerances);

/// Bounds as an experimenter would compute them from the two scans above, with
/// first-order propagated standard errors. The ML branch additionally needs <H>
/// (prior knowledge) and is filled only when `mean_energy` is given.
MeasuredSummary measured_bounds(const DensityMatrix& rho, const ComplexMatrix& h, double T,
                                double tau, const std::vector<double>& settings,
                                std::uint64_t shots, std::uint64_t seed, double hbar = 1.0,
                                std::optional<double> mean_energy = std::nullopt,
                                const Tolerances& tol = kDefaultTolerances);

}  // namespace orbitqsl
