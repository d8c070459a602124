#include "orbitqsl/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orbitqsl/random.hpp"

namespace orbitqsl {

namespace {

// Half-width of the image of [x - dx, x + dx] under f, with x clamped into [0, 1].
template <typename F>
double propagate_interval(F f, double x, double dx) {
  const double lo = std::clamp(x - dx, 0.0, 1.0);
  const double hi = std::clamp(x + dx, 0.0, 1.0);
  return 0.5 * std::abs(f(hi) - f(lo));
}

double fold_phase(double phi) { return phi <= -std::numbers::pi ? std::numbers::pi : phi; }

}  // namespace

std::vector<double> default_settings(std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(count);
  }
  return out;
}

double detector_probability(const DensityMatrix& rho, const ComplexMatrix& u_upper,
                            const ComplexMatrix& u_lower, double chi, const Tolerances& tol) {
  require_same_dim(rho.matrix(), u_upper, "state and upper-arm unitary");
  require_same_dim(rho.matrix(), u_lower, "state and lower-arm unitary");
  require_unitary(u_upper, tol, "upper-arm unitary");
  require_unitary(u_lower, tol, "lower-arm unitary");
  const Complex kernel = (rho.matrix() * u_lower.adjoint() * u_upper).trace();
  // V cos(Phi + chi) = Re(e^{i chi} V e^{i Phi})
  const double p = 0.5 * (1.0 + (std::exp(Complex(0.0, chi)) * kernel).real());
  return std::clamp(p, 0.0, 1.0);
}

FringeScan sample_scan(const DensityMatrix& rho, const ComplexMatrix& u_upper,
                       const ComplexMatrix& u_lower, const std::vector<double>& settings,
                       std::uint64_t shots, std::uint64_t seed, const Tolerances& tol) {
  FringeScan scan;
  scan.settings = settings;
  scan.shots_per_setting = shots;
  scan.seed = seed;
  scan.frequencies.reserve(settings.size());
  if (shots != kExactShots) scan.counts_d.reserve(settings.size());
  for (std::size_t j = 0; j < settings.size(); ++j) {
    const double p = detector_probability(rho, u_upper, u_lower, settings[j], tol);
    if (shots == kExactShots) {
      scan.frequencies.push_back(p);
      continue;
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    std::binomial_distribution<std::uint64_t> law(shots, p);
    const std::uint64_t count = law(rng);
    scan.counts_d.push_back(count);
    scan.frequencies.push_back(static_cast<double>(count) / static_cast<double>(shots));
  }
  return scan;
}

FringeFit fit_fringe(const FringeScan& scan) {
  const std::size_t n = scan.settings.size();
  if (scan.frequencies.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "scan has mismatched settings and frequencies");
  }
  std::vector<double> sorted = scan.settings;
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = static_cast<std::size_t>(
      std::unique(sorted.begin(), sorted.end(),
                  [](double a, double b) { return std::abs(a - b) < 1e-12; }) -
      sorted.begin());
  if (distinct < 4 || sorted.back() - sorted.front() < std::numbers::pi - 1e-12) {
    throw Error(ErrorKind::InsufficientSettings,
                "fringe fit needs at least 4 distinct settings spanning pi");
  }

  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    design(row, 0) = 1.0;
    design(row, 1) = std::cos(scan.settings[j]);
    design(row, 2) = std::sin(scan.settings[j]);
    y[row] = scan.frequencies[j];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw Error(ErrorKind::DegenerateFit, "design matrix rank below 3");
  const Eigen::Vector3d beta = qr.solve(y);

  const double residual = (y - design * beta).squaredNorm();
  const double sigma2 = n > 3 ? residual / static_cast<double>(n - 3) : 0.0;
  const Eigen::Matrix3d cov = sigma2 * (design.transpose() * design).inverse();

  const double b = beta[1];
  const double c = beta[2];
  const double amp = std::hypot(b, c);

  FringeFit fit;
  fit.offset = beta[0];
  fit.estimate.visibility = std::clamp(2.0 * amp, 0.0, 1.0);
  fit.estimate.phase = amp < 1e-14 ? 0.0 : fold_phase(std::atan2(-c, b));
  if (amp > 0.0) {
    const Eigen::Vector2d gv(2.0 * b / amp, 2.0 * c / amp);
    const Eigen::Vector2d gp(c / (amp * amp), -b / (amp * amp));
    const Eigen::Matrix2d cbc = cov.block<2, 2>(1, 1);
    fit.visibility_stderr = std::sqrt(std::max(0.0, gv.dot(cbc * gv)));
    fit.phase_stderr = std::sqrt(std::max(0.0, gp.dot(cbc * gp)));
  } else {
    fit.visibility_stderr = 2.0 * std::sqrt(std::max(0.0, 0.5 * (cov(1, 1) + cov(2, 2))));
    fit.phase_stderr = std::numbers::pi;
  }
  fit.phase_identifiable = fit.estimate.visibility > 1e-12 &&
                           fit.estimate.visibility > 3.0 * fit.visibility_stderr;
  return fit;
}

BargmannEstimate measure_bargmann(const DensityMatrix& rho, const ComplexMatrix& h, double T,
                                  const std::vector<double>& settings, std::uint64_t shots,
                                  std::uint64_t seed, double hbar, const Tolerances& tol) {
  const ComplexMatrix u = propagator(h, T, hbar, tol);
  BargmannEstimate out;
  out.fit = fit_fringe(sample_scan(rho, u, identity(rho.dim()), settings, shots, seed, tol));
  const double v = out.fit.estimate.visibility;
  out.s0 = bargmann_angle_from_visibility(v);
  out.std_error = propagate_interval(bargmann_angle_from_visibility, v, out.fit.visibility_stderr);
  return out;
}

SpeedEstimate measure_speed(const DensityMatrix& rho, const ComplexMatrix& h, double t, double tau,
                            const std::vector<double>& settings, std::uint64_t shots,
                            std::uint64_t seed, double hbar, const Tolerances& tol) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  const EigenSystem eig = hermitian_eig(h, tol);
  const ComplexMatrix upper = propagator(eig, t, hbar);
  const ComplexMatrix lower = propagator(eig, t + tau, hbar);
  SpeedEstimate out;
  out.tau = tau;
  out.fit = fit_fringe(sample_scan(rho, upper, lower, settings, shots, seed, tol));
  const auto speed = [tau](double vis) { return 2.0 / tau * std::sqrt(std::max(0.0, 1.0 - vis * vis)); };
  const double v = out.fit.estimate.visibility;
  out.v_hat = speed(v);
  out.std_error = propagate_interval(speed, v, out.fit.visibility_stderr);
  out.v_true = quantum_speed(rho, h, hbar, tol);
  return out;
}

MeasuredSummary measured_bounds(const DensityMatrix& rho, const ComplexMatrix& h, double T,
                                double tau, const std::vector<double>& settings,
                                std::uint64_t shots, std::uint64_t seed, double hbar,
                                std::optional<double> mean_energy, const Tolerances& tol) {
  const BargmannEstimate angle =
      measure_bargmann(rho, h, T, settings, shots, derive_seed(seed, "bargmann"), hbar, tol);
  const SpeedEstimate speed =
      measure_speed(rho, h, 0.0, tau, settings, shots, derive_seed(seed, "speed"), hbar, tol);

  MeasuredSummary m;
  m.visibility = angle.fit.estimate.visibility;
  m.visibility_stderr = angle.fit.visibility_stderr;
  m.phase = angle.fit.estimate.phase;
  m.bargmann_angle = angle.s0;
  m.bargmann_stderr = angle.std_error;
  m.speed = speed.v_hat;
  m.speed_stderr = speed.std_error;
  m.tau = tau;
  m.shots = shots;

  // hbar s0 / (2 dH) = s0 / v
  if (m.bargmann_angle == 0.0) {
    m.mt_bound = 0.0;
    m.mt_stderr = m.speed > 0.0 ? m.bargmann_stderr / m.speed : kInfiniteBound;
  } else if (m.speed > 0.0) {
    m.mt_bound = m.bargmann_angle / m.speed;
    m.mt_stderr = m.mt_bound * std::hypot(m.bargmann_stderr / m.bargmann_angle,
                                          m.speed_stderr / m.speed);
  } else {
    m.mt_bound = kInfiniteBound;
    m.mt_stderr = kInfiniteBound;
  }

  if (mean_energy && *mean_energy > 1e-14) {
    const double pi = std::numbers::pi;
    const double scale = pi * hbar / (2.0 * *mean_energy);
    const double vis = m.visibility;
    const double phi = m.phase;
    const double re = vis * std::cos(phi);
    const double im = vis * std::sin(phi);
    m.ml_bound = std::max(0.0, scale * (1.0 - re + (2.0 / pi) * im));
    const double d_vis = scale * (-std::cos(phi) + (2.0 / pi) * std::sin(phi));
    const double d_phi = scale * vis * (std::sin(phi) + (2.0 / pi) * std::cos(phi));
    m.ml_stderr = std::hypot(d_vis * m.visibility_stderr, d_phi * angle.fit.phase_stderr);
  }
  return m;
}

}  // namespace orbitqsl
