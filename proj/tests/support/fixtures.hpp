#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "orbitqsl/numerics.hpp"
#include "orbitqsl/states.hpp"

namespace orbitqsl::fixtures {

/// Qubit example: n = (1/sqrt2, 1/sqrt3, -1/sqrt6), r = (0, 0, 1/2),
/// H = omega (n.sigma + alpha I) with alpha = omega = hbar = 1, T = pi/2.
inline const std::array<double, 3> kAxis{1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt3,
                                         -1.0 / std::sqrt(6.0)};
inline const BlochVector kBloch{0.0, 0.0, 0.5};
inline const double kTime = std::numbers::pi / 2.0;

// Reference values from an independent scipy (expm / sqrtm) evaluation.
inline constexpr double kVisibility = 0.2041241452319314;     // 1 / (2 sqrt 6)
inline constexpr double kBargmann = 2.7304547912674457;
inline constexpr double kDeltaH = 0.9789450103725609;         // sqrt(23/24)
inline constexpr double kMtBound = 1.3945904838047574;
inline constexpr double kSpeed = 1.9578900207451218;
inline constexpr double kFidelity = 0.8897565210026095;       // sqrt(19/24)
inline constexpr double kBuresAngle = 0.9479697413828927;
inline constexpr double kBuresBaseline = 0.4841792599883216;
inline constexpr double kDetectorP = 0.6020620726159657;

inline ComplexMatrix axis_sigma(const std::array<double, 3>& n) {
  return n[0] * pauli_x() + n[1] * pauli_y() + n[2] * pauli_z();
}

inline ComplexMatrix qubit_hamiltonian(const std::array<double, 3>& n = kAxis, double alpha = 1.0,
                                       double omega = 1.0) {
  return omega * (axis_sigma(n) + alpha * identity(2));
}

inline DensityMatrix qubit_state() { return density_from_bloch(kBloch); }

}  // namespace orbitqsl::fixtures
