#include "orbitqsl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orbitqsl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BlochOutOfBall: return "BlochOutOfBall";
    case ErrorKind::EmptySchedule: return "EmptySchedule";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroMeanEnergy: return "ZeroMeanEnergy";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::IncompleteKraus: return "IncompleteKraus";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::InsufficientSettings: return "InsufficientSettings";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

ComplexMatrix EigenSystem::reconstruct() const {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "max_abs_diff operands differ in shape");
  }
  return max_abs(a - b);
}

bool is_square(const ComplexMatrix& m) noexcept { return m.rows() == m.cols() && m.rows() > 0; }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return is_square(m) && max_abs(m - m.adjoint()) <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  return is_square(m) && max_abs(m.adjoint() * m - identity(m.rows())) <= tol;
}

void require_hermitian(const ComplexMatrix& m, const Tolerances& tol, std::string_view what) {
  if (!is_square(m)) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " is not a non-empty square matrix");
  }
  const double dev = max_abs(m - m.adjoint());
  if (dev > tol.hermitian) {
    std::ostringstream os;
    os << what << " deviates from Hermitian by " << dev;
    throw Error(ErrorKind::NotHermitian, os.str());
  }
}

void require_unitary(const ComplexMatrix& m, const Tolerances& tol, std::string_view what) {
  if (!is_square(m)) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " is not a non-empty square matrix");
  }
  const double dev = max_abs(m.adjoint() * m - identity(m.rows()));
  if (dev > tol.unitary) {
    std::ostringstream os;
    os << what << " deviates from unitary by " << dev;
    throw Error(ErrorKind::NotUnitary, os.str());
  }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << what << ": " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

EigenSystem hermitian_eig(const ComplexMatrix& m, const Tolerances& tol) {
  require_hermitian(m, tol, "hermitian_eig input");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "eigen solver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix propagator(const EigenSystem& eig, double t, double hbar) {
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
  const Complex minus_i(0.0, -1.0);
  ComplexVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    phases[k] = std::exp(minus_i * (eig.values[k] * t / hbar));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix propagator(const ComplexMatrix& hamiltonian, double t, double hbar,
                         const Tolerances& tol) {
  return propagator(hermitian_eig(hamiltonian, tol), t, hbar);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep) {
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  if (dim_a == 0 || dim_b == 0 || m.rows() != da * db || m.cols() != da * db) {
    std::ostringstream os;
    os << "partial_trace expects " << dim_a * dim_b << "x" << dim_a * dim_b << ", got " << m.rows()
       << "x" << m.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (keep == Subsystem::A) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < da; ++j)
        for (Eigen::Index k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index k = 0; k < da; ++k) out += m.block(k * db, k * db, db, db);
  return out;
}

ComplexMatrix ancilla_block(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            std::size_t row, std::size_t col) {
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  if (m.rows() != da * db || m.cols() != da * db || row >= dim_b || col >= dim_b) {
    throw Error(ErrorKind::DimensionMismatch, "ancilla_block index or shape out of range");
  }
  ComplexMatrix out(da, da);
  const auto r = static_cast<Eigen::Index>(row);
  const auto c = static_cast<Eigen::Index>(col);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) out(i, j) = m(i * db + r, j * db + c);
  return out;
}

ComplexMatrix sqrt_psd(const ComplexMatrix& m, const Tolerances& tol) {
  EigenSystem eig = hermitian_eig(m, tol);
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    double& lambda = eig.values[k];
    if (lambda < -tol.psd) {
      std::ostringstream os;
      os << "sqrt_psd input has eigenvalue " << lambda;
      throw Error(ErrorKind::NotPSD, os.str());
    }
    lambda = std::sqrt(std::max(lambda, 0.0));
  }
  return eig.reconstruct();
}

ComplexMatrix pauli_x() {
  ComplexMatrix s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  return s;
}

ComplexMatrix pauli_y() {
  ComplexMatrix s(2, 2);
  s << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return s;
}

ComplexMatrix pauli_z() {
  ComplexMatrix s(2, 2);
  s << 1.0, 0.0, 0.0, -1.0;
  return s;
}

}  // namespace orbitqsl
