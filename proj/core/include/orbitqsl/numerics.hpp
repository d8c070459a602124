#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "orbitqsl/error.hpp"

namespace orbitqsl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared by every module. All thresholds are absolute.
struct Tolerances {
  double hermitian = 1e-10;   // max |M - M^dagger| entry
  double unitary = 1e-9;      // max |U^dagger U - I| entry
  double psd = 1e-10;         // eigenvalues above -psd are clamped to zero
  double reconstruction = 1e-9;
  double degeneracy = 1e-9;   // eigenvalues closer than this share a projector
  double trace = 1e-10;       // |Tr rho - 1| for density matrices
};

inline const Tolerances kDefaultTolerances{};

/// Hermitian eigensystem. `values` ascending, `vectors` holds eigenvectors as columns.
struct EigenSystem {
  RealVector values;
  ComplexMatrix vectors;

  ComplexMatrix reconstruct() const;
};

double max_abs(const ComplexMatrix& m);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_square(const ComplexMatrix& m) noexcept;
bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTolerances.hermitian);
bool is_unitary(const ComplexMatrix& m, double tol = kDefaultTolerances.unitary);

// Throw Error(NotHermitian / NotUnitary / DimensionMismatch) with `what` as context.
void require_hermitian(const ComplexMatrix& m, const Tolerances& tol, std::string_view what);
void require_unitary(const ComplexMatrix& m, const Tolerances& tol, std::string_view what);
void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, std::string_view what);

EigenSystem hermitian_eig(const ComplexMatrix& m, const Tolerances& tol = kDefaultTolerances);

/// U = exp(-i H t / hbar), computed from the spectral decomposition of H.
ComplexMatrix propagator(const ComplexMatrix& hamiltonian, double t, double hbar = 1.0,
                         const Tolerances& tol = kDefaultTolerances);

/// Same as `propagator` but reuses an already computed eigensystem of H.
ComplexMatrix propagator(const EigenSystem& eig, double t, double hbar = 1.0);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

enum class Subsystem { A, B };

/// Partial trace of an operator on H_A (x) H_B, keeping subsystem `keep`.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep);

/// Block <row| M |col> over the B factor of M on H_A (x) H_B; a dim_a x dim_a operator on A.
ComplexMatrix ancilla_block(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            std::size_t row, std::size_t col);

/// Principal square root of a PSD matrix. Eigenvalues in [-tol.psd, 0) are clamped to zero.
ComplexMatrix sqrt_psd(const ComplexMatrix& m, const Tolerances& tol = kDefaultTolerances);

inline ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + m.adjoint()) / 2.0; }

// Pauli matrices sigma^1, sigma^2, sigma^3.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

}  // namespace orbitqsl
