#include "orbitqsl/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orbitqsl {

DensityMatrix DensityMatrix::validate(const ComplexMatrix& m, const Tolerances& tol) {
  require_hermitian(m, tol, "density matrix");
  const double trace = m.trace().real();
  if (std::abs(trace - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "density matrix trace is " << trace;
    throw Error(ErrorKind::TraceNotOne, os.str());
  }
  ComplexMatrix h = hermitian_part(m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  const double lowest = solver.eigenvalues()[0];
  if (lowest < -tol.psd) {
    std::ostringstream os;
    os << "density matrix has eigenvalue " << lowest;
    throw Error(ErrorKind::NotPSD, os.str());
  }
  return DensityMatrix(std::move(h));
}

bool DensityMatrix::is_pure() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(mat_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()[solver.eigenvalues().size() - 1] > 1.0 - kPurityThreshold;
}

DensityMatrix DensityMatrix::evolved(const ComplexMatrix& u, const Tolerances& tol) const {
  require_same_dim(mat_, u, "evolved: state and unitary");
  require_unitary(u, tol, "evolution operator");
  return DensityMatrix(hermitian_part(u * mat_ * u.adjoint()));
}

DensityMatrix density_from_bloch(const BlochVector& r) {
  const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (!(norm <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "|r| = " << norm << " exceeds 1";
    throw Error(ErrorKind::BlochOutOfBall, os.str());
  }
  ComplexMatrix m = (identity(2) + r[0] * pauli_x() + r[1] * pauli_y() + r[2] * pauli_z()) / 2.0;
  // Points within roundoff outside the ball are accepted as pure states.
  Tolerances tol;
  tol.psd = std::max(tol.psd, 1e-12);
  return DensityMatrix::validate(m, tol);
}

BlochVector bloch_vector(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "bloch_vector needs a qubit state");
  const ComplexMatrix& m = rho.matrix();
  return {(m * pauli_x()).trace().real(), (m * pauli_y()).trace().real(),
          (m * pauli_z()).trace().real()};
}

DensityMatrix pure_state(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "pure_state needs a nonzero vector");
  const ComplexVector unit = psi / norm;
  return DensityMatrix::validate(unit * unit.adjoint());
}

EigenSystem spectral_decompose(const DensityMatrix& rho) {
  EigenSystem eig = hermitian_eig(rho.matrix());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    eig.values[k] = std::clamp(eig.values[k], 0.0, 1.0);
  }
  return eig;
}

PurifiedState PurifiedState::apply_local(const ComplexMatrix& u) const {
  return {kron(u, identity(dim_b)) * vec, dim_a, dim_b};
}

PurifiedState purify(const DensityMatrix& rho, const ComplexMatrix& v_a, const ComplexMatrix& v_b) {
  require_same_dim(rho.matrix(), v_a, "purify: V_A");
  require_same_dim(rho.matrix(), v_b, "purify: V_B");
  require_unitary(v_a, kDefaultTolerances, "purify: V_A");
  require_unitary(v_b, kDefaultTolerances, "purify: V_B");
  const auto d = static_cast<Eigen::Index>(rho.dim());
  // (X (x) Y) sum_i |i i> has amplitude (X Y^T)_{ab} on |a b>.
  const ComplexMatrix amplitudes = sqrt_psd(rho.matrix()) * v_a * v_b.transpose();
  ComplexVector vec(d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) vec[a * d + b] = amplitudes(a, b);
  return {std::move(vec), rho.dim(), rho.dim()};
}

PurifiedState purify(const DensityMatrix& rho) {
  return purify(rho, identity(rho.dim()), identity(rho.dim()));
}

HamiltonianSchedule HamiltonianSchedule::constant(ComplexMatrix h, double hbar,
                                                  const Tolerances& tol) {
  require_hermitian(h, tol, "Hamiltonian");
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
  HamiltonianSchedule s;
  s.constant_ = hermitian_part(h);
  s.hbar_ = hbar;
  return s;
}

HamiltonianSchedule HamiltonianSchedule::sampled(std::vector<Sample> samples, double hbar,
                                                 const Tolerances& tol) {
  if (samples.empty()) throw Error(ErrorKind::EmptySchedule, "sampled schedule has no samples");
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require_hermitian(samples[i].hamiltonian, tol, "schedule sample");
    require_same_dim(samples[0].hamiltonian, samples[i].hamiltonian, "schedule sample");
    samples[i].hamiltonian = hermitian_part(samples[i].hamiltonian);
    if (i > 0 && !(samples[i].time > samples[i - 1].time)) {
      throw Error(ErrorKind::InvalidArgument, "schedule sample times must be strictly increasing");
    }
  }
  HamiltonianSchedule s;
  s.samples_ = std::move(samples);
  s.hbar_ = hbar;
  return s;
}

std::size_t HamiltonianSchedule::dim() const noexcept {
  return static_cast<std::size_t>(is_constant() ? constant_.rows() : samples_.front().hamiltonian.rows());
}

ComplexMatrix HamiltonianSchedule::at(double t) const {
  if (is_constant()) return constant_;
  if (t <= samples_.front().time) return samples_.front().hamiltonian;
  if (t >= samples_.back().time) return samples_.back().hamiltonian;
  const auto hi = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double x, const Sample& s) { return x < s.time; });
  const auto lo = hi - 1;
  const double w = (t - lo->time) / (hi->time - lo->time);
  return (1.0 - w) * lo->hamiltonian + w * hi->hamiltonian;
}

std::vector<double> HamiltonianSchedule::grid(double t1, double t2) const {
  std::vector<double> pts{t1};
  for (const Sample& s : samples_) {
    if (s.time > t1 && s.time < t2) pts.push_back(s.time);
  }
  if (t2 > t1) pts.push_back(t2);
  return pts;
}

ComplexMatrix HamiltonianSchedule::evolution(double t1, double t2, const Tolerances& tol) const {
  if (is_constant()) return propagator(constant_, t2 - t1, hbar_, tol);
  if (t2 < t1) return evolution(t2, t1, tol).adjoint();
  const std::vector<double> pts = grid(t1, t2);
  ComplexMatrix u = identity(dim());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    u = propagator(at(mid), pts[i + 1] - pts[i], hbar_, tol) * u;
  }
  return u;
}

}  // namespace orbitqsl
