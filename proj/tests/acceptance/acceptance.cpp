// Acceptance suite. Prints one PASS/FAIL line per criterion; `--criterion N` runs one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "orbitqsl/cptp.hpp"
#include "orbitqsl/interferometer.hpp"
#include "orbitqsl/orbit_metric.hpp"
#include "orbitqsl/random.hpp"
#include "orbitqsl/speed_limits.hpp"
#include "orbitqsl_cli/commands.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace orbitqsl;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds
  std::function<Outcome()> body;
};

constexpr std::uint64_t kSeed = 20260101;

struct Instance {
  DensityMatrix rho;
  ComplexMatrix h;
  double t;
  bool psd;
};

// dims 2..4, T in (0, 4 pi], half PSD Hamiltonians, every fifth state pure
std::vector<Instance> sweep_instances(std::size_t count, std::uint64_t seed) {
  std::vector<Instance> out;
  Rng rng(seed);
  std::uniform_real_distribution<double> time(0.0, 4.0 * pi);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = 2 + i % 3;
    const bool psd = i % 2 == 0;
    DensityMatrix rho = i % 5 == 0 ? random_pure_state(d, rng) : random_density(d, rng);
    ComplexMatrix h = psd ? random_psd_hamiltonian(d, rng) : random_hermitian(d, rng);
    double t = time(rng);
    if (t <= 0.0) t = 4.0 * pi;
    out.push_back({std::move(rho), std::move(h), t, psd});
  }
  return out;
}

Outcome ac1() {
  Outcome o;
  const auto& n = fixtures::kAxis;
  const BlochVector& r = fixtures::kBloch;
  const BlochVector evolved =
      bloch_vector(fixtures::qubit_state().evolved(propagator(fixtures::qubit_hamiltonian(), fixtures::kTime)));
  const double nr = n[0] * r[0] + n[1] * r[1] + n[2] * r[2];
  const std::array<double, 3> quoted{-4.0 * std::sqrt(3.0) / 15.0, std::sqrt(2.0) / 15.0, -1.0 / 6.0};
  double rule_err = 0.0, quoted_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    rule_err = std::max(rule_err, std::abs(evolved[k] - (2.0 * n[k] * nr - r[k])));
    quoted_err = std::max(quoted_err, std::abs(evolved[k] - quoted[k]));
  }
  o.require(rule_err < 1e-12, fmt::format("rule 2n(n.r)-r vs evolution off by {:.3g}", rule_err));
  o.require(quoted_err < 1e-12,
            fmt::format("evolved r' = ({:.6f}, {:.6f}, {:.6f}) vs expected ({:.6f}, {:.6f}, {:.6f}), max diff {:.3g}",
                        evolved[0], evolved[1], evolved[2], quoted[0], quoted[1], quoted[2], quoted_err));
  if (o.pass) o.detail = fmt::format("max diff {:.3g}", quoted_err);
  return o;
}

Outcome ac2() {
  Outcome o;
  Rng rng(derive_seed(kSeed, "ac2"));
  const ComplexMatrix h = fixtures::qubit_hamiltonian();
  double ml_dev = 0.0, mt_max = 0.0, comb_dev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const DensityMatrix rho = random_density(2, rng);
    const BoundReport r = combined_bound(rho, h, pi / 2.0);
    ml_dev = std::max(ml_dev, std::abs(*r.ml_bound - pi / 2.0));
    mt_max = std::max(mt_max, *r.mt_bound);
    comb_dev = std::max(comb_dev, std::abs(*r.combined_bound - pi / 2.0));
  }
  o.require(ml_dev < 1e-9, fmt::format("max |ml - pi/2| = {:.3g}", ml_dev));
  o.require(mt_max <= pi / 2.0 + 1e-9, fmt::format("max mt = {:.12g}", mt_max));
  o.require(comb_dev < 1e-9, fmt::format("combined not tight: {:.3g}", comb_dev));
  if (o.pass) o.detail = fmt::format("max |ml - pi/2| = {:.2g}, max mt = {:.6f}", ml_dev, mt_max);
  return o;
}

Outcome ac3() {
  Outcome o;
  cli::RunConfig cfg;
  cfg.command = "reproduce";
  cfg.which = "qubit-example";
  cfg.deterministic = true;
  const cli::Json doc = cli::cmd_reproduce(cfg);
  const cli::Json& sec = doc.at("sections").at(0);
  const cli::Json& rep = sec.at("report");
  const double mt = rep.at("mt_bound"), ml = rep.at("ml_bound"), comb = rep.at("combined_bound");
  o.require(std::abs(mt - fixtures::kMtBound) < 1e-9, fmt::format("mt = {:.9g}", mt));
  o.require(std::abs(ml - pi / 2.0) < 1e-9, fmt::format("ml = {:.9g}", ml));
  o.require(comb <= pi / 2.0 + 1e-9, "combined bound exceeds T");
  int quoted = 0, flagged = 0;
  for (const cli::Json& e : sec.at("entries")) {
    if (e.at("kind") == "check") o.require(e.at("verdict") == "pass", e.at("quantity").get<std::string>());
    if (e.at("kind") == "closed_form" && e.at("quantity").get<std::string>().find("_vs_rule") == std::string::npos)
      o.require(e.at("verdict") == "match", e.at("quantity").get<std::string>());
    if (e.at("kind") == "quoted") {
      ++quoted;
      flagged += e.at("verdict") == "mismatch";
    }
  }
  o.require(quoted >= 4, "quoted values missing from the audit");
  if (o.pass)
    o.detail = fmt::format("mt {:.6f}, ml {:.6f}, baseline {:.6f}; {} of {} quoted values flagged mismatch", mt, ml,
                           rep.at("bures_baseline_bound").get<double>(), flagged, quoted);
  return o;
}

Outcome ac4() {
  Outcome o;
  const auto instances = sweep_instances(1200, derive_seed(kSeed, "sweep"));
  Rng rng(derive_seed(kSeed, "ac4-dilations"));
  std::size_t checked = 0, worst_i = 0;
  double worst = kInfiniteBound;
  auto track = [&](double slack, std::size_t i) {
    ++checked;
    if (slack < worst) {
      worst = slack;
      worst_i = i;
    }
  };
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& in = instances[i];
    const BoundReport r = combined_bound(in.rho, in.h, in.t);
    track(in.t - *r.mt_bound, i);
    if (r.ml_bound) track(in.t - *r.ml_bound, i);
    if (r.chau_bound) track(in.t - *r.chau_bound, i);
    if (r.improved_chau_bound) track(in.t - *r.improved_chau_bound, i);
    DilatedSystem sys;
    sys.H_AB = random_hermitian(2 * in.rho.dim(), rng);
    sys.ancilla_dim = 2;
    sys.nu = i % 2;
    track(in.t - cptp_bound(in.rho, sys, in.t), i);
  }
  o.require(worst >= -1e-9, fmt::format("min slack {:.3g} at instance {}", worst, worst_i));
  if (o.pass) o.detail = fmt::format("{} instances, {} bound checks, min slack {:.3g}", instances.size(), checked, worst);
  return o;
}

Outcome ac5() {
  Outcome o;
  const auto instances = sweep_instances(1200, derive_seed(kSeed, "sweep"));
  double dominance = kInfiniteBound, fidelity_gap = kInfiniteBound, pure_gap = 0.0;
  for (const Instance& in : instances) {
    const ComplexMatrix u = propagator(in.h, in.t);
    const DensityMatrix moved = in.rho.evolved(u);
    const double s0 = bargmann_angle(in.rho, u);
    const double theta = bures_angle(in.rho, moved);
    dominance = std::min(dominance, s0 - theta);
    fidelity_gap = std::min(fidelity_gap, uhlmann_fidelity(in.rho, moved) - visibility_phase(in.rho, u).visibility);
    if (in.rho.is_pure()) pure_gap = std::max(pure_gap, std::abs(s0 - theta));
  }
  o.require(dominance >= -1e-9, fmt::format("s0 - Bures min {:.3g}", dominance));
  o.require(fidelity_gap >= -1e-9, fmt::format("F - V min {:.3g}", fidelity_gap));
  o.require(pure_gap < 1e-9, fmt::format("pure |s0 - Bures| max {:.3g}", pure_gap));
  if (o.pass)
    o.detail = fmt::format("min s0-Theta {:.3g}, min F-V {:.3g}, pure max gap {:.3g}", dominance, fidelity_gap, pure_gap);
  return o;
}

Outcome ac6() {
  Outcome o;
  Rng rng(derive_seed(kSeed, "ac6"));
  double sym = 0.0, tri = kInfiniteBound, fs = 0.0, ratio = 0.0;
  auto angle = [](const PurifiedState& x, const PurifiedState& y) {
    return std::acos(std::min(1.0, std::abs(x.vec.dot(y.vec))));
  };
  for (int i = 0; i < 500; ++i) {
    const std::size_t d = 2 + static_cast<std::size_t>(i % 3);
    const DensityMatrix rho = random_density(d, rng);
    const ComplexMatrix u1 = random_unitary(d, rng), u2 = random_unitary(d, rng);
    const DensityMatrix moved = rho.evolved(u1);
    sym = std::max(sym, std::abs(std::abs((rho.matrix() * u1).trace()) - std::abs((moved.matrix() * u1).trace())));

    const PurifiedState p0 = purify(rho), p1 = p0.apply_local(u1), p2 = p0.apply_local(u2 * u1);
    tri = std::min(tri, angle(p0, p1) + angle(p1, p2) - angle(p0, p2));

    const DensityMatrix psi = random_pure_state(d, rng);
    const EigenSystem eig = hermitian_eig(psi.matrix());
    const ComplexVector v = eig.vectors.col(static_cast<Eigen::Index>(d) - 1);
    const double overlap = std::abs(v.dot(u1 * v));
    const double dist = orbit_distance(psi, u1);
    fs = std::max(fs, std::abs(dist * dist - 4.0 * (1.0 - overlap * overlap)));

    const ComplexMatrix h = random_hermitian(d, rng);
    const double speed = quantum_speed(rho, h);
    if (speed > 1e-3) {
      const double dt = 1e-5;
      const double dd = orbit_distance(rho, h, dt);
      ratio = std::max(ratio, std::abs(dd * dd / (speed * dt * speed * dt) - 1.0));
    }
  }
  o.require(sym < 1e-12, fmt::format("symmetry {:.3g}", sym));
  o.require(tri >= -1e-9, fmt::format("triangle {:.3g}", tri));
  o.require(fs < 1e-12, fmt::format("Fubini-Study {:.3g}", fs));
  o.require(ratio < 1e-4, fmt::format("second-order ratio {:.3g}", ratio));
  if (o.pass)
    o.detail = fmt::format("symmetry {:.2g}, triangle slack {:.2g}, FS {:.2g}, ratio dev {:.2g}", sym, tri, fs, ratio);
  return o;
}

Outcome ac7() {
  Outcome o;
  const auto instances = sweep_instances(1200, derive_seed(kSeed, "sweep"));
  double spectral = 0.0, chain = kInfiniteBound, upper = kInfiniteBound;
  for (const Instance& in : instances) {
    const EnergyDistribution dist = energy_distribution(in.rho, in.h);
    const Complex direct = (in.rho.matrix() * oracle::propagator_taylor(in.h, in.t)).trace();
    spectral = std::max(spectral, std::abs(direct - dist.characteristic(in.t, 1.0)));
    if (!in.psd) continue;
    double re = 0.0;
    for (std::size_t n = 0; n < dist.energies.size(); ++n) re += dist.probs[n] * std::cos(dist.energies[n] * in.t);
    const double v = std::abs(direct);
    upper = std::min(upper, v - std::abs(re));
    chain = std::min(chain, std::abs(re) - (1.0 - kChauConstant * in.t * dist.mean_abs()));
  }
  o.require(spectral < 1e-9, fmt::format("spectral identity {:.3g}", spectral));
  o.require(upper >= -1e-9, fmt::format("V >= |sum p cos| violated by {:.3g}", upper));
  o.require(chain >= -1e-9, fmt::format("Chau chain violated by {:.3g}", chain));
  if (o.pass) o.detail = fmt::format("spectral {:.2g}, chain slack {:.3g}", spectral, std::min(chain, upper));
  return o;
}

Outcome ac8() {
  Outcome o;
  Rng rng(derive_seed(kSeed, "ac8"));
  std::uniform_real_distribution<double> mu_d(-2.0, 2.0), t_d(0.0, 4.0);
  double closed = 0.0, reduction = 0.0, round_trip = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 3> mu{mu_d(rng), mu_d(rng), mu_d(rng)};
    const DensityMatrix rho = random_density(2, rng);
    const double r3 = bloch_vector(rho)[2], t = t_d(rng);
    closed = std::max(closed, std::abs(canonical_bound(mu, r3, t) - cptp_bound(rho, canonical_system(mu), t)));
  }
  for (double theta2 = 0.0; theta2 <= pi / 2.0 + 1e-12; theta2 += pi / 40.0) {
    for (double r3 : {-1.0, -0.5, 0.0, 0.3, 0.9}) {
      const std::array<double, 3> mu{pi, theta2, pi};
      const double denom = std::sqrt(pi * pi + theta2 * theta2 + pi * pi * (1.0 - r3 * r3) - 2.0 * pi * theta2 * r3);
      if (denom < 1e-12) continue;
      reduction = std::max(reduction, std::abs(canonical_bound(mu, r3, 1.0) - theta2 / denom));
    }
  }
  for (auto [da, db] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}}) {
    for (int i = 0; i < 100; ++i) {
      DilatedSystem sys;
      sys.H_AB = 2.0 * random_hermitian(da * db, rng);
      sys.ancilla_dim = db;
      const DensityMatrix rho = random_density(da, rng);
      const double t = t_d(rng);
      const ComplexMatrix u = oracle::propagator_taylor(sys.H_AB, t);
      const ComplexMatrix joint = u * kron(rho.matrix(), sys.ancilla_projector()) * u.adjoint();
      const ComplexMatrix expected = oracle::trace_out_b(joint, static_cast<int>(da), static_cast<int>(db));
      round_trip = std::max(round_trip, max_abs_diff(apply_channel(rho, dilate(sys, t)).matrix(), expected));
    }
  }
  o.require(closed < 1e-9, fmt::format("closed form vs dilation {:.3g}", closed));
  o.require(reduction < 1e-12, fmt::format("reduction {:.3g}", reduction));
  o.require(round_trip < 1e-9, fmt::format("round trip {:.3g}", round_trip));
  if (o.pass) o.detail = fmt::format("closed {:.2g}, reduction {:.2g}, round trip {:.2g}", closed, reduction, round_trip);
  return o;
}

Outcome ac9() {
  Outcome o;
  const auto settings = default_settings();
  const std::uint64_t seed = derive_seed(kSeed, "ac9");
  const BargmannEstimate a = measure_bargmann(fixtures::qubit_state(), fixtures::qubit_hamiltonian(), fixtures::kTime,
                                              settings, 1000000, seed);
  const BargmannEstimate b = measure_bargmann(fixtures::qubit_state(), fixtures::qubit_hamiltonian(), fixtures::kTime,
                                              settings, 1000000, seed);
  const double v_err = std::abs(a.fit.estimate.visibility - 0.204124);
  const double s_err = std::abs(a.s0 - 2.73054);
  const SpeedEstimate sp = measure_speed(fixtures::qubit_state(), fixtures::qubit_hamiltonian(), 0.0, 1e-3, settings,
                                         kExactShots, 0);
  const double rel = std::abs(sp.v_hat / (2.0 * fixtures::kDeltaH) - 1.0);
  o.require(v_err < 0.003, fmt::format("|V - 0.204124| = {:.3g}", v_err));
  o.require(s_err < 0.03, fmt::format("|s0 - 2.73054| = {:.3g}", s_err));
  o.require(rel < 1e-4, fmt::format("speed relative error {:.3g}", rel));
  o.require(a.s0 == b.s0 && a.fit.estimate.visibility == b.fit.estimate.visibility, "not deterministic");
  if (o.pass) o.detail = fmt::format("|dV| {:.2g}, |ds0| {:.2g}, speed rel {:.2g}", v_err, s_err, rel);
  return o;
}

const std::vector<Criterion> kCriteria{
    {1, "qubit example evolved Bloch vector", 1.0, ac1},
    {2, "saturation identity on 100 qubit states", 5.0, ac2},
    {3, "worked-example audit report", 5.0, ac3},
    {4, "bound validity sweep", 60.0, ac4},
    {5, "angle dominance and fidelity", 60.0, ac5},
    {6, "metric axioms on purifications", 60.0, ac6},
    {7, "spectral identity and Chau chain", 60.0, ac7},
    {8, "CPTP closed form and dilation", 30.0, ac8},
    {9, "interferometric estimation", 60.0, ac9},
};

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > c.time_limit) o.require(false, fmt::format("took {:.2f}s, limit {:.0f}s", secs, c.time_limit));
  fmt::print("AC{} {}: {} ({}) [{:.2f}s]\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail, secs);
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      fmt::print(stderr, "usage: {} [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  bool all = true;
  bool found = false;
  for (const Criterion& c : kCriteria) {
    if (only && c.id != only) continue;
    found = true;
    all = run_one(c) && all;
  }
  if (!found) {
    fmt::print(stderr, "no criterion {}\n", only);
    return 2;
  }
  return all ? 0 : 1;
}
