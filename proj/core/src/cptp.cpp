#include "orbitqsl/cptp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orbitqsl/orbit_metric.hpp"
#include "orbitqsl/speed_limits.hpp"

namespace orbitqsl {

KrausChannel KrausChannel::from_operators(std::vector<ComplexMatrix> kraus, double tolerance) {
  if (kraus.empty()) throw Error(ErrorKind::IncompleteKraus, "channel has no Kraus operators");
  const auto dim = static_cast<std::size_t>(kraus.front().rows());
  for (const ComplexMatrix& e : kraus) {
    if (!is_square(e) || static_cast<std::size_t>(e.rows()) != dim) {
      throw Error(ErrorKind::DimensionMismatch, "Kraus operators must share one square shape");
    }
  }
  KrausChannel ch(std::move(kraus), dim);
  const double err = ch.completeness_error();
  if (err > tolerance) {
    std::ostringstream os;
    os << "sum of E^dagger E deviates from identity by " << err;
    throw Error(ErrorKind::IncompleteKraus, os.str());
  }
  return ch;
}

double KrausChannel::completeness_error() const {
  ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (const ComplexMatrix& e : kraus_) sum += e.adjoint() * e;
  return max_abs(sum - identity(dim_));
}

std::size_t DilatedSystem::system_dim() const {
  return ancilla_dim == 0 ? 0 : static_cast<std::size_t>(H_AB.rows()) / ancilla_dim;
}

void DilatedSystem::validate(const Tolerances& tol) const {
  require_hermitian(H_AB, tol, "H_AB");
  if (ancilla_dim == 0 || static_cast<std::size_t>(H_AB.rows()) % ancilla_dim != 0) {
    throw Error(ErrorKind::DimensionMismatch, "H_AB dimension is not a multiple of dB");
  }
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
  if (ancilla_state) {
    if (static_cast<std::size_t>(ancilla_state->size()) != ancilla_dim) {
      throw Error(ErrorKind::DimensionMismatch, "ancilla state length differs from dB");
    }
    if (std::abs(ancilla_state->norm() - 1.0) > 1e-10) {
      throw Error(ErrorKind::InvalidArgument, "ancilla state is not normalised");
    }
  } else if (nu >= ancilla_dim) {
    throw Error(ErrorKind::InvalidArgument, "ancilla index nu must be below dB");
  }
}

ComplexVector DilatedSystem::ancilla_vector() const {
  if (ancilla_state) return *ancilla_state;
  ComplexVector e = ComplexVector::Zero(static_cast<Eigen::Index>(ancilla_dim));
  e[static_cast<Eigen::Index>(nu)] = 1.0;
  return e;
}

ComplexMatrix DilatedSystem::ancilla_projector() const {
  const ComplexVector e = ancilla_vector();
  return e * e.adjoint();
}

namespace {

// sum_{k,l} conj(bra_k) ket_l <k|M|l>_B
ComplexMatrix ancilla_matrix_element(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                                     const ComplexVector& bra, const ComplexVector& ket) {
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim_a), static_cast<Eigen::Index>(dim_a));
  for (std::size_t k = 0; k < dim_b; ++k) {
    const Complex bk = std::conj(bra[static_cast<Eigen::Index>(k)]);
    if (bk == Complex(0.0)) continue;
    for (std::size_t l = 0; l < dim_b; ++l) {
      const Complex kl = ket[static_cast<Eigen::Index>(l)];
      if (kl == Complex(0.0)) continue;
      out += bk * kl * ancilla_block(m, dim_a, dim_b, k, l);
    }
  }
  return out;
}

void require_system_match(const DensityMatrix& rho, const DilatedSystem& sys) {
  if (rho.dim() != sys.system_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "state dimension differs from dim(H_AB)/dB");
  }
}

}  // namespace

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& channel,
                            const Tolerances& tol) {
  if (rho.dim() != channel.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "state and channel dimensions differ");
  }
  const double err = channel.completeness_error();
  if (err > 1e-9) throw Error(ErrorKind::IncompleteKraus, "channel is not trace preserving");
  ComplexMatrix out = ComplexMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const ComplexMatrix& e : channel.operators()) out += e * rho.matrix() * e.adjoint();
  return DensityMatrix::validate(hermitian_part(out), tol);
}

KrausChannel dilate(const DilatedSystem& sys, double T, const Tolerances& tol) {
  sys.validate(tol);
  const ComplexMatrix u = propagator(sys.H_AB, T, sys.hbar, tol);
  const std::size_t da = sys.system_dim();
  const ComplexVector e = sys.ancilla_vector();
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(sys.ancilla_dim);
  for (std::size_t k = 0; k < sys.ancilla_dim; ++k) {
    ComplexVector basis = ComplexVector::Zero(static_cast<Eigen::Index>(sys.ancilla_dim));
    basis[static_cast<Eigen::Index>(k)] = 1.0;
    kraus.push_back(ancilla_matrix_element(u, da, sys.ancilla_dim, basis, e));
  }
  return KrausChannel::from_operators(std::move(kraus));
}

ComplexMatrix transition_operator(const DilatedSystem& sys, double T, const Tolerances& tol) {
  sys.validate(tol);
  const ComplexMatrix u = propagator(sys.H_AB, T, sys.hbar, tol);
  const ComplexVector e = sys.ancilla_vector();
  return ancilla_matrix_element(u, sys.system_dim(), sys.ancilla_dim, e, e);
}

DensityMatrix dilated_output(const DensityMatrix& rho, const DilatedSystem& sys, double T,
                             const Tolerances& tol) {
  sys.validate(tol);
  require_system_match(rho, sys);
  const ComplexMatrix u = propagator(sys.H_AB, T, sys.hbar, tol);
  const ComplexMatrix joint = kron(rho.matrix(), sys.ancilla_projector());
  const ComplexMatrix out = partial_trace(u * joint * u.adjoint(), sys.system_dim(),
                                          sys.ancilla_dim, Subsystem::A);
  return DensityMatrix::validate(hermitian_part(out), tol);
}

ComplexMatrix effective_hamiltonian(const DilatedSystem& sys) {
  const ComplexVector e = sys.ancilla_vector();
  return ancilla_matrix_element(sys.H_AB, sys.system_dim(), sys.ancilla_dim, e, e);
}

double effective_speed(const DensityMatrix& rho, const DilatedSystem& sys, const Tolerances& tol) {
  sys.validate(tol);
  require_system_match(rho, sys);
  const ComplexVector e = sys.ancilla_vector();
  const std::size_t da = sys.system_dim();
  const ComplexMatrix h1 = ancilla_matrix_element(sys.H_AB, da, sys.ancilla_dim, e, e);
  const ComplexMatrix h2 = ancilla_matrix_element(sys.H_AB * sys.H_AB, da, sys.ancilla_dim, e, e);
  const double first = (rho.matrix() * h1).trace().real();
  const double second = (rho.matrix() * h2).trace().real();
  return 2.0 / sys.hbar * std::sqrt(std::max(0.0, second - first * first));
}

double cptp_bound(const DensityMatrix& rho, const DilatedSystem& sys, double T,
                  const Tolerances& tol) {
  if (!(T >= 0.0)) throw Error(ErrorKind::InvalidArgument, "evolution time must be non-negative");
  require_system_match(rho, sys);
  if (T == 0.0) return 0.0;
  const ComplexMatrix e_nu = transition_operator(sys, T, tol);
  const double visibility = std::clamp(std::abs((rho.matrix() * e_nu).trace()), 0.0, 1.0);
  const double v = effective_speed(rho, sys, tol);
  if (v < 1e-14) return 1.0 - visibility < 1e-12 ? 0.0 : kInfiniteBound;
  return 2.0 / v * std::acos(visibility);
}

double canonical_visibility(const std::array<double, 3>& mu, double r3, double T, double hbar) {
  const double t1 = mu[0] * T / hbar;
  const double t2 = mu[1] * T / hbar;
  const double t3 = mu[2] * T / hbar;
  const double re = std::cos(t1) * std::cos(t2) * std::cos(t3) +
                    r3 * std::sin(t1) * std::sin(t2) * std::cos(t3);
  const double im = std::sin(t1) * std::sin(t2) * std::sin(t3) +
                    r3 * std::cos(t1) * std::cos(t2) * std::sin(t3);
  return std::sqrt(re * re + im * im);
}

double canonical_bound(const std::array<double, 3>& mu, double r3, double T, double hbar) {
  if (!(std::abs(r3) <= 1.0)) throw Error(ErrorKind::BlochOutOfBall, "|r3| must not exceed 1");
  const double k = std::clamp(canonical_visibility(mu, r3, T, hbar), 0.0, 1.0);
  const double angle = std::acos(k);
  if (angle == 0.0) return 0.0;
  const double radicand = mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2] * (1.0 - r3 * r3) -
                          2.0 * mu[0] * mu[1] * r3;
  const double denom = std::sqrt(std::max(0.0, radicand));
  if (denom < 1e-14) {
    throw Error(ErrorKind::DegenerateDenominator, "effective speed vanishes for this (mu, r3)");
  }
  return hbar * angle / denom;
}

DilatedSystem canonical_system(const std::array<double, 3>& mu, double hbar) {
  DilatedSystem sys;
  sys.H_AB = mu[0] * kron(pauli_x(), pauli_x()) + mu[1] * kron(pauli_y(), pauli_y()) +
             mu[2] * kron(pauli_z(), pauli_z());
  sys.ancilla_dim = 2;
  sys.nu = 0;
  sys.hbar = hbar;
  return sys;
}

}  // namespace orbitqsl
