#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "orbitqsl/numerics.hpp"

namespace orbitqsl {

using BlochVector = std::array<double, 3>;

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
/// Degenerate and pure states are accepted.
class DensityMatrix {
 public:
  /// Checks the three state axioms in order (Hermitian, trace, positivity) and
  /// throws Error naming the first one violated.
  static DensityMatrix validate(const ComplexMatrix& m, const Tolerances& tol = kDefaultTolerances);

  const ComplexMatrix& matrix() const noexcept { return mat_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(mat_.rows()); }

  /// Largest eigenvalue above 1 - 1e-9.
  bool is_pure() const;

  /// U rho U^dagger. U must be unitary.
  DensityMatrix evolved(const ComplexMatrix& u, const Tolerances& tol = kDefaultTolerances) const;

 private:
  explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

inline constexpr double kPurityThreshold = 1e-9;

/// rho = (I + r.sigma) / 2. Throws BlochOutOfBall if |r| > 1 + 1e-12.
DensityMatrix density_from_bloch(const BlochVector& r);

/// r_i = Tr(rho sigma^i) for a qubit state.
BlochVector bloch_vector(const DensityMatrix& rho);

DensityMatrix pure_state(const ComplexVector& psi);

/// Eigenvalues clamped into [0, 1], ascending; eigenvectors as columns.
EigenSystem spectral_decompose(const DensityMatrix& rho);

/// Vector on H_A (x) H_B with basis index a * dim_b + b.
struct PurifiedState {
  ComplexVector vec;
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;

  ComplexMatrix projector() const { return vec * vec.adjoint(); }
  /// (U (x) I) |Psi>
  PurifiedState apply_local(const ComplexMatrix& u) const;
};

/// |Psi> = (sqrt(rho) (x) I) sum_i |i i>.
PurifiedState purify(const DensityMatrix& rho);

/// |Psi> = (sqrt(rho) V_A (x) V_B) sum_i |i i> for arbitrary local unitaries.
PurifiedState purify(const DensityMatrix& rho, const ComplexMatrix& v_a, const ComplexMatrix& v_b);

/// Time-independent or sampled Hermitian generator together with hbar.
///
/// A sampled schedule is interpreted as piecewise linear between sample times and
/// constant outside the sampled range.
class HamiltonianSchedule {
 public:
  struct Sample {
    double time;
    ComplexMatrix hamiltonian;
  };

  static HamiltonianSchedule constant(ComplexMatrix h, double hbar = 1.0,
                                      const Tolerances& tol = kDefaultTolerances);
  static HamiltonianSchedule sampled(std::vector<Sample> samples, double hbar = 1.0,
                                     const Tolerances& tol = kDefaultTolerances);

  bool is_constant() const noexcept { return samples_.empty(); }
  double hbar() const noexcept { return hbar_; }
  std::size_t dim() const noexcept;
  const ComplexMatrix& constant_hamiltonian() const { return constant_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }

  ComplexMatrix at(double t) const;

  /// Time points t1, every sample time strictly inside (t1, t2), t2.
  std::vector<double> grid(double t1, double t2) const;

  /// Evolution operator from t1 to t2. Sampled schedules are stepped across the
  /// grid with the Hamiltonian at each interval midpoint.
  ComplexMatrix evolution(double t1, double t2, const Tolerances& tol = kDefaultTolerances) const;

 private:
  HamiltonianSchedule() = default;
  ComplexMatrix constant_;
  std::vector<Sample> samples_;
  double hbar_ = 1.0;
};

}  // namespace orbitqsl
