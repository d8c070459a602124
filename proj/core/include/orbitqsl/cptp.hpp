#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "orbitqsl/numerics.hpp"
#include "orbitqsl/states.hpp"

namespace orbitqsl {

/// Kraus representation {E_k} with sum_k E_k^dagger E_k = I.
class KrausChannel {
 public:
  /// Throws IncompleteKraus if the completeness relation fails by more than `tolerance`.
  static KrausChannel from_operators(std::vector<ComplexMatrix> kraus, double tolerance = 1e-9);

  const std::vector<ComplexMatrix>& operators() const noexcept { return kraus_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return kraus_.size(); }

  /// max entry of |sum_k E_k^dagger E_k - I|
  double completeness_error() const;

 private:
  KrausChannel(std::vector<ComplexMatrix> kraus, std::size_t dim)
      : kraus_(std::move(kraus)), dim_(dim) {}
  std::vector<ComplexMatrix> kraus_;
  std::size_t dim_ = 0;
};

/// System-plus-ancilla unitary model of a channel: H_AB on H_A (x) H_B with the
/// ancilla prepared in basis state |nu>, or in `ancilla_state` when given.
struct DilatedSystem {
  ComplexMatrix H_AB;
  std::size_t ancilla_dim = 2;
  std::size_t nu = 0;
  double hbar = 1.0;
  std::optional<ComplexVector> ancilla_state;

  std::size_t system_dim() const;
  /// Checks Hermiticity, the dimension split, and the ancilla index or vector.
  void validate(const Tolerances& tol = kDefaultTolerances) const;
  ComplexVector ancilla_vector() const;
  ComplexMatrix ancilla_projector() const;
};

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& channel,
                            const Tolerances& tol = kDefaultTolerances);

/// E_k = <k| U_AB(T) |nu>_B for k = 0 .. dB-1. Near-zero operators are kept so
/// that index k always matches ancilla basis state k.
KrausChannel dilate(const DilatedSystem& sys, double T, const Tolerances& tol = kDefaultTolerances);

/// <e| U_AB(T) |e>_B, equal to sum_k c_k^* E_k with c_k = <k|e>; E_nu for a basis ancilla.
ComplexMatrix transition_operator(const DilatedSystem& sys, double T,
                                  const Tolerances& tol = kDefaultTolerances);

/// Tr_B[U_AB (rho (x) |e><e|) U_AB^dagger] evaluated directly on the joint space.
DensityMatrix dilated_output(const DensityMatrix& rho, const DilatedSystem& sys, double T,
                             const Tolerances& tol = kDefaultTolerances);

/// Effective Hamiltonian <e|H_AB|e>_B.
ComplexMatrix effective_hamiltonian(const DilatedSystem& sys);

/// v = (2/hbar) sqrt(Tr(rho <e|H^2|e>) - Tr(rho <e|H|e>)^2). Not the variance of
/// the effective Hamiltonian, since <e|H^2|e> differs from <e|H|e>^2.
double effective_speed(const DensityMatrix& rho, const DilatedSystem& sys,
                       const Tolerances& tol = kDefaultTolerances);

/// (2/v) arccos |Tr(rho E_nu(T))|; 0 at T = 0, kInfiniteBound when v ~ 0 and s0 > 0.
double cptp_bound(const DensityMatrix& rho, const DilatedSystem& sys, double T,
                  const Tolerances& tol = kDefaultTolerances);

/// Closed form of cptp_bound for H = sum_i mu_i sigma^i (x) sigma^i, ancilla |0>,
/// and a qubit with Bloch z-component r3.
double canonical_bound(const std::array<double, 3>& mu, double r3, double T, double hbar = 1.0);

/// K of the closed form, the visibility |Tr(rho E_0(T))| for the canonical Hamiltonian.
double canonical_visibility(const std::array<double, 3>& mu, double r3, double T,
                            double hbar = 1.0);

/// sum_i mu_i sigma^i (x) sigma^i as a 4x4 DilatedSystem with ancilla |0>.
DilatedSystem canonical_system(const std::array<double, 3>& mu, double hbar = 1.0);

}  // namespace orbitqsl
