#include "orbitqsl_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "orbitqsl/cptp.hpp"
#include "orbitqsl/interferometer.hpp"
#include "orbitqsl/orbit_metric.hpp"
#include "orbitqsl/random.hpp"
#include "orbitqsl/speed_limits.hpp"

namespace orbitqsl::cli {

namespace {

using std::numbers::pi;

constexpr std::uint64_t kDefaultShots = 100000;
constexpr double kDefaultTau = 0.05;

double number_at(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorKind::ParseError, std::string("expected a number under \"") + key + "\"");
  return j.at(key).get<double>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::ParseError, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double instance_hbar(const RunConfig& cfg, const Json& j) {
  if (j.is_object() && j.contains("hbar")) return number_at(j, "hbar");
  return cfg.hbar.value_or(1.0);
}

HamiltonianSchedule schedule_of(const RunConfig& cfg, const Json& j) {
  const double hbar = instance_hbar(cfg, j);
  if (j.contains("hamiltonian")) return io::schedule_from_json(j.at("hamiltonian"), hbar);
  if (j.contains("schedule")) return io::schedule_from_json(j.at("schedule"), hbar);
  throw Error(ErrorKind::ParseError, "missing field \"hamiltonian\" or \"schedule\"");
}

const ComplexMatrix& constant_h(const HamiltonianSchedule& s, const char* what) {
  if (!s.is_constant())
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " needs a time-independent Hamiltonian");
  return s.constant_hamiltonian();
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json header(const RunConfig& cfg) {
  Json doc{{"command", cfg.command}, {"seed", cfg.seed}};
  if (!cfg.deterministic) doc["timestamp"] = utc_timestamp();
  return doc;
}

Json vector_json(const std::array<double, 3>& v) { return Json::array({v[0], v[1], v[2]}); }

// ---- reproduce -------------------------------------------------------------

struct Audit {
  Json entries = Json::array();
  double tol;

  void compare(const std::string& quantity, double computed, double reference, const std::string& kind,
               double tolerance) {
    const bool ok = std::abs(computed - reference) <= tolerance;
    entries.push_back({{"quantity", quantity},
                       {"computed", computed},
                       {"reference", reference},
                       {"kind", kind},
                       {"tolerance", tolerance},
                       {"verdict", ok ? "match" : "mismatch"}});
  }
  void check(const std::string& quantity, double computed, bool ok, const std::string& condition) {
    entries.push_back({{"quantity", quantity},
                       {"computed", computed},
                       {"reference", condition},
                       {"kind", "check"},
                       {"tolerance", tol},
                       {"verdict", ok ? "pass" : "fail"}});
  }
};

Json reproduce_qubit(const RunConfig& cfg) {
  Audit a{Json::array(), cfg.tolerance};
  const std::array<double, 3> n{1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt3, -1.0 / std::sqrt(6.0)};
  const BlochVector r{0.0, 0.0, 0.5};
  const double t = pi / 2.0;
  const ComplexMatrix h = n[0] * pauli_x() + n[1] * pauli_y() + n[2] * pauli_z() + identity(2);
  const DensityMatrix rho = density_from_bloch(r);
  const BlochVector evolved = bloch_vector(rho.evolved(propagator(h, t)));
  const double nr = n[0] * r[0] + n[1] * r[1] + n[2] * r[2];

  const std::array<double, 3> rule{2 * n[0] * nr - r[0], 2 * n[1] * nr - r[1], 2 * n[2] * nr - r[2]};
  const std::array<double, 3> quoted{-4.0 * std::sqrt(3.0) / 15.0, std::sqrt(2.0) / 15.0, -1.0 / 6.0};
  const char* axes[] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) {
    a.compare(fmt::format("r_prime_{}_vs_rule", axes[k]), evolved[k], rule[k], "closed_form", 1e-12);
    a.compare(fmt::format("r_prime_{}", axes[k]), evolved[k], quoted[k], "quoted", 1e-12);
  }

  const BoundReport rep = combined_bound(rho, h, t);
  a.compare("visibility", rep.visibility, std::abs(nr), "closed_form", cfg.tolerance);
  a.compare("bargmann_angle", rep.bargmann_angle, 2.0 * std::acos(std::abs(nr)), "closed_form", cfg.tolerance);
  a.compare("delta_H", rep.delta_H, std::sqrt(1.0 - nr * nr), "closed_form", cfg.tolerance);
  a.compare("re_part", rep.re_part, -nr, "closed_form", cfg.tolerance);
  a.compare("im_part", rep.im_part, 0.0, "closed_form", cfg.tolerance);
  a.compare("mean_H", rep.mean_H, 1.0 + nr, "closed_form", cfg.tolerance);
  a.compare("ml_bound", *rep.ml_bound, pi / 2.0, "closed_form", cfg.tolerance);
  // Quoted to two decimals.
  a.compare("mt_bound", *rep.mt_bound, 1.09, "quoted", 0.005);
  a.compare("ml_bound", *rep.ml_bound, 0.86, "quoted", 0.005);
  a.compare("combined_bound", *rep.combined_bound, 1.09, "quoted", 0.005);
  a.compare("bures_baseline_bound", *rep.bures_baseline_bound, 0.31, "quoted", 0.005);
  a.check("combined_bound_le_T", *rep.combined_bound, *rep.combined_bound <= t + cfg.tolerance, "<= pi/2");
  a.check("combined_bound_saturates", *rep.combined_bound, std::abs(*rep.combined_bound - t) <= cfg.tolerance,
          "== pi/2");
  for (const char* key : {"mt_bound", "chau_bound", "improved_chau_bound", "bures_baseline_bound"}) {
    const Json j = io::report_to_json(rep);
    const double b = j.at(key).get<double>();
    a.check(std::string(key) + "_le_T", b, b <= t + cfg.tolerance, "<= pi/2");
  }
  return Json{{"name", "qubit-example"},
              {"axis", vector_json(n)},
              {"bloch", vector_json(r)},
              {"T", t},
              {"r_prime", vector_json(evolved)},
              {"report", io::report_to_json(rep)},
              {"entries", a.entries}};
}

Json reproduce_cptp(const RunConfig& cfg) {
  Audit a{Json::array(), cfg.tolerance};
  const double hbar = cfg.hbar.value_or(1.0);
  const std::array<double, 3> mu{0.3, 0.7, 1.1};
  const double r3 = 0.4, t = 1.3;
  const DilatedSystem sys = canonical_system(mu, hbar);
  const DensityMatrix rho = density_from_bloch({0.2, -0.1, r3});
  const KrausChannel ch = dilate(sys, t);
  a.check("kraus_completeness_error", ch.completeness_error(), ch.completeness_error() <= cfg.tolerance,
          "<= tolerance");
  const double numeric = cptp_bound(rho, sys, t);
  a.compare("canonical_vs_dilated_bound", canonical_bound(mu, r3, t, hbar), numeric, "closed_form", cfg.tolerance);
  a.compare("canonical_vs_dilated_visibility", canonical_visibility(mu, r3, t, hbar),
            std::abs((rho.matrix() * transition_operator(sys, t)).trace()), "closed_form", cfg.tolerance);
  a.check("cptp_bound_le_T", numeric, numeric <= t + cfg.tolerance, "<= T");

  const ComplexMatrix joint = kron(rho.matrix(), sys.ancilla_projector());
  a.compare("purified_overlap", std::abs((rho.matrix() * transition_operator(sys, t)).trace()),
            std::abs((joint * propagator(sys.H_AB, t, hbar)).trace()), "closed_form", 1e-12);

  for (double theta2 : {0.0, 0.25, 0.5, 1.0, pi / 2.0}) {
    for (double q : {-0.6, 0.0, 0.8}) {
      const std::array<double, 3> m{pi * hbar, theta2 * hbar, pi * hbar};
      const double denom = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2] * (1.0 - q * q) - 2.0 * m[0] * m[1] * q);
      a.compare(fmt::format("reduction_theta2_{:.4g}_r3_{:.2g}", theta2, q), canonical_bound(m, q, 1.0, hbar),
                hbar * theta2 / denom, "closed_form", cfg.tolerance);
    }
  }
  return Json{{"name", "cptp-example"},
              {"mu", vector_json(mu)},
              {"r3", r3},
              {"T", t},
              {"hbar", hbar},
              {"entries", a.entries}};
}

Json reproduce_saturation(const RunConfig& cfg) {
  Audit a{Json::array(), cfg.tolerance};
  Rng rng(derive_seed(cfg.seed, "saturation-family"));
  const std::array<double, 3> n{1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt3, -1.0 / std::sqrt(6.0)};
  const ComplexMatrix h = n[0] * pauli_x() + n[1] * pauli_y() + n[2] * pauli_z() + identity(2);
  const HamiltonianSchedule sched = HamiltonianSchedule::constant(h);
  double ml_dev = 0.0, mt_excess = -kInfiniteBound;
  constexpr int kStates = 100;
  for (int i = 0; i < kStates; ++i) {
    const DensityMatrix rho = random_density(2, rng);
    ml_dev = std::max(ml_dev, std::abs(ml_bound(rho, h, pi / 2.0) - pi / 2.0));
    mt_excess = std::max(mt_excess, mt_bound(rho, sched, pi / 2.0) - pi / 2.0);
  }
  a.check("max_abs_ml_minus_half_pi", ml_dev, ml_dev < cfg.tolerance, "< tolerance");
  a.check("max_mt_minus_half_pi", mt_excess, mt_excess <= cfg.tolerance, "<= tolerance");
  return Json{{"name", "saturation-family"}, {"states", kStates}, {"entries", a.entries}};
}

// ---- sweep -----------------------------------------------------------------

Json sweep_row(const RunConfig& cfg, std::size_t index, std::uint64_t seed) {
  Rng rng(seed);
  const SweepSpec& s = cfg.sweep;
  const std::size_t d = s.dim_min + static_cast<std::size_t>(rng() % (s.dim_max - s.dim_min + 1));

  std::string kind = s.states;
  if (kind == "mixed") {
    static const char* cycle[] = {"hs", "pure", "maximally-mixed"};
    kind = cycle[index % 3];
  }
  const DensityMatrix rho = kind == "pure"              ? random_pure_state(d, rng)
                            : kind == "maximally-mixed" ? DensityMatrix::validate(identity(d) / static_cast<double>(d))
                                                        : random_density(d, rng);
  bool psd = s.hamiltonians == "psd" || (s.hamiltonians == "mixed" && index % 2 == 0);
  const ComplexMatrix h = psd ? random_psd_hamiltonian(d, rng) : random_hermitian(d, rng);
  double t = std::uniform_real_distribution<double>(0.0, s.t_max)(rng);
  if (t <= 0.0) t = s.t_max;
  const double hbar = cfg.hbar.value_or(1.0);

  const BoundReport r = combined_bound(rho, h, t, hbar);
  DilatedSystem sys;
  sys.H_AB = random_hermitian(2 * d, rng);
  sys.ancilla_dim = 2;
  sys.hbar = hbar;
  const double cptp = cptp_bound(rho, sys, t);

  Json row{{"index", index},
           {"seed", seed},
           {"dim", d},
           {"state", kind},
           {"pure", rho.is_pure()},
           {"h_psd", r.h_psd},
           {"T", t},
           {"visibility", r.visibility},
           {"bargmann_angle", r.bargmann_angle},
           {"bures_angle", r.bures_angle}};
  double min_slack = kInfiniteBound;
  auto put = [&](const char* key, const std::optional<double>& b) {
    if (b && std::isfinite(*b)) {
      row[key] = *b;
      min_slack = std::min(min_slack, t - *b);
    } else {
      row[key] = nullptr;
    }
  };
  put("mt_bound", r.mt_bound);
  put("ml_bound", r.ml_bound);
  put("combined_bound", r.combined_bound);
  put("chau_bound", r.chau_bound);
  put("improved_chau_bound", r.improved_chau_bound);
  put("cptp_bound", cptp);
  // The baseline is a comparator, not a claimed bound, so it stays out of the slack.
  row["bures_baseline_bound"] = r.bures_baseline_bound ? finite_or_null(*r.bures_baseline_bound) : Json(nullptr);
  row["min_slack"] = finite_or_null(min_slack);
  return row;
}

const std::vector<std::string> kSweepColumns{
    "index",     "seed",       "dim",          "state",         "pure",     "h_psd",          "T",
    "visibility", "bargmann_angle", "bures_angle", "mt_bound",   "ml_bound", "combined_bound", "chau_bound",
    "improved_chau_bound", "cptp_bound", "bures_baseline_bound", "min_slack"};

const std::vector<std::string> kAuditColumns{"section", "quantity", "computed", "reference",
                                             "kind",    "tolerance", "verdict"};

// ---- rendering -------------------------------------------------------------

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return fmt::format("{}", v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
  }
  return v.dump();
}

std::string table_cell(const Json& v) {
  if (v.is_null()) return "-";
  if (v.is_number_float()) return fmt::format("{:.6g}", v.get<double>());
  return csv_cell(v);
}

bool is_scalar(const Json& v) { return v.is_primitive(); }

std::vector<std::string> scalar_keys(const Json& obj) {
  std::vector<std::string> keys;
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (is_scalar(it.value())) keys.push_back(it.key());
  return keys;
}

void write_rows(std::ostream& os, const std::vector<std::string>& cols, const std::vector<Json>& rows, Format f) {
  if (f == Format::Csv) {
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
    os << '\n';
    for (const Json& row : rows) {
      for (std::size_t c = 0; c < cols.size(); ++c)
        os << (c ? "," : "") << (row.contains(cols[c]) ? csv_cell(row.at(cols[c])) : "");
      os << '\n';
    }
    return;
  }
  std::vector<std::size_t> width(cols.size());
  std::vector<std::vector<std::string>> cells;
  for (std::size_t c = 0; c < cols.size(); ++c) width[c] = cols[c].size();
  for (const Json& row : rows) {
    std::vector<std::string> line;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      line.push_back(row.contains(cols[c]) ? table_cell(row.at(cols[c])) : "");
      width[c] = std::max(width[c], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  for (std::size_t c = 0; c < cols.size(); ++c) os << fmt::format("{:<{}}", cols[c], width[c] + 2);
  os << '\n';
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < cols.size(); ++c) os << fmt::format("{:<{}}", line[c], width[c] + 2);
    os << '\n';
  }
}

// One record rendered as key,value pairs, nested objects flattened with dots.
void flatten(const Json& j, const std::string& prefix, std::vector<Json>& rows) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object())
      flatten(it.value(), key, rows);
    else if (is_scalar(it.value()))
      rows.push_back({{"key", key}, {"value", it.value()}});
  }
}

void write_record(std::ostream& os, const Json& j, Format f) {
  std::vector<Json> rows;
  flatten(j, "", rows);
  write_rows(os, {"key", "value"}, rows, f);
}

FringeScan scan_from_doc(const Json& j) {
  FringeScan scan;
  scan.settings = j.at("settings").get<std::vector<double>>();
  scan.frequencies = j.at("frequencies").get<std::vector<double>>();
  if (j.at("shots_per_setting").is_number()) {
    scan.shots_per_setting = j.at("shots_per_setting").get<std::uint64_t>();
    scan.counts_d = j.at("counts_D").get<std::vector<std::uint64_t>>();
  }
  return scan;
}

Format default_format(const std::string& command) {
  return command == "sweep" ? Format::Csv : Format::Json;
}

Json read_input(const RunConfig& cfg) {
  if (!cfg.input_path) throw Error(ErrorKind::ParseError, "--input is required for " + cfg.command);
  std::ifstream in(*cfg.input_path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open input file " + *cfg.input_path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

Json error_json(std::string_view kind, const std::string& message) {
  return Json{{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

// ---- commands --------------------------------------------------------------

Json cmd_bound(const RunConfig& cfg, const Json& input) {
  const Json instances = input.contains("instances") ? input.at("instances") : Json::array({input});
  if (!instances.is_array()) throw Error(ErrorKind::ParseError, "\"instances\" must be an array");
  Json doc = header(cfg);
  doc["reports"] = Json::array();
  const std::uint64_t base = derive_seed(cfg.seed, "bound");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Json& inst = instances.at(i);
    const DensityMatrix rho = io::state_from_json(field(inst, "state"));
    const HamiltonianSchedule sched = schedule_of(cfg, inst);
    const double t = number_at(inst, "T");
    BoundReport r = sched.is_constant() ? combined_bound(rho, sched.constant_hamiltonian(), t, sched.hbar())
                                        : bound_report(rho, sched, t);
    if (cfg.shots) {
      const std::optional<double> mean =
          r.h_psd && r.mean_H > 1e-14 ? std::optional<double>(r.mean_H) : std::nullopt;
      r.measured = measured_bounds(rho, constant_h(sched, "measured bounds"), t, cfg.tau.value_or(kDefaultTau),
                                   default_settings(), *cfg.shots, derive_seed(base, i), sched.hbar(), mean);
    }
    Json rj = io::report_to_json(r);
    rj["instance"] = i;
    doc["reports"].push_back(std::move(rj));
  }
  return doc;
}

Json cmd_metric(const RunConfig& cfg, const Json& input) {
  const DensityMatrix rho = io::state_from_json(field(input, "state"));
  Json doc = header(cfg);
  ComplexMatrix u;
  if (input.contains("unitary")) {
    u = io::matrix_from_json(input.at("unitary"));
  } else {
    const HamiltonianSchedule sched = schedule_of(cfg, input);
    const double t = number_at(input, "T");
    u = sched.evolution(0.0, t);
    doc["T"] = t;
    doc["hbar"] = sched.hbar();
    if (t > 0.0) doc["path_length"] = path_length(rho, sched, 0.0, t);
    if (sched.is_constant()) {
      doc["delta_H"] = energy_uncertainty(rho, sched.constant_hamiltonian());
      doc["speed"] = quantum_speed(rho, sched.constant_hamiltonian(), sched.hbar());
    }
  }
  const PhaseVisibility pv = visibility_phase(rho, u);
  const DensityMatrix moved = rho.evolved(u);
  doc["visibility"] = pv.visibility;
  doc["phase"] = pv.phase;
  doc["orbit_distance"] = orbit_distance(rho, u);
  doc["bargmann_angle"] = bargmann_angle_from_visibility(pv.visibility);
  doc["fidelity"] = uhlmann_fidelity(rho, moved);
  doc["bures_angle"] = bures_angle(rho, moved);
  doc["final_state"] = io::state_to_json(moved);
  return doc;
}

Json cmd_channel(const RunConfig& cfg, const Json& input) {
  Json doc = header(cfg);
  if (input.contains("canonical")) {
    const Json& c = input.at("canonical");
    const auto mu_v = field(c, "mu").get<std::vector<double>>();
    if (mu_v.size() != 3) throw Error(ErrorKind::ParseError, "\"mu\" must have three entries");
    const std::array<double, 3> mu{mu_v[0], mu_v[1], mu_v[2]};
    const double hbar = instance_hbar(cfg, c);
    const double t = number_at(input, "T");
    const DensityMatrix rho = input.contains("state") ? io::state_from_json(input.at("state"))
                                                      : density_from_bloch({0.0, 0.0, number_at(c, "r3")});
    const double r3 = bloch_vector(rho)[2];
    const DilatedSystem sys = canonical_system(mu, hbar);
    const double numeric = cptp_bound(rho, sys, t);
    doc["mu"] = vector_json(mu);
    doc["r3"] = r3;
    doc["T"] = t;
    doc["hbar"] = hbar;
    doc["visibility"] = canonical_visibility(mu, r3, t, hbar);
    doc["effective_speed"] = effective_speed(rho, sys);
    doc["closed_form_bound"] = finite_or_null(canonical_bound(mu, r3, t, hbar));
    doc["dilated_bound"] = finite_or_null(numeric);
    doc["output_state"] = io::state_to_json(dilated_output(rho, sys, t));
    return doc;
  }
  const DensityMatrix rho = io::state_from_json(field(input, "state"));
  if (input.contains("kraus")) {
    const KrausChannel ch = io::channel_from_json(input);
    doc["completeness_error"] = ch.completeness_error();
    doc["output_state"] = io::state_to_json(apply_channel(rho, ch));
    return doc;
  }
  const DilatedSystem sys = io::dilated_from_json(field(input, "dilation"), cfg.hbar.value_or(1.0));
  const double t = number_at(input, "T");
  const KrausChannel ch = dilate(sys, t);
  const double vis = std::abs((rho.matrix() * transition_operator(sys, t)).trace());
  const double bound = cptp_bound(rho, sys, t);
  doc["T"] = t;
  doc["kraus"] = io::channel_to_json(ch).at("kraus");
  doc["completeness_error"] = ch.completeness_error();
  doc["output_state"] = io::state_to_json(apply_channel(rho, ch));
  doc["visibility"] = vis;
  doc["bargmann_angle"] = bargmann_angle_from_visibility(vis);
  doc["effective_speed"] = effective_speed(rho, sys);
  doc["cptp_bound"] = finite_or_null(bound);
  if (!std::isfinite(bound)) doc["reasons"] = {{"cptp_bound", "dilation produces no first-order motion"}};
  return doc;
}

Json cmd_interfere(const RunConfig& cfg, const Json& input) {
  const DensityMatrix rho = io::state_from_json(field(input, "state"));
  const HamiltonianSchedule sched = schedule_of(cfg, input);
  const ComplexMatrix& h = constant_h(sched, "interfere");
  const double t = number_at(input, "T");
  const std::vector<double> settings =
      input.contains("settings") ? input.at("settings").get<std::vector<double>>() : default_settings();
  const std::uint64_t shots = cfg.shots.value_or(kDefaultShots);
  const std::uint64_t seed = derive_seed(cfg.seed, "interfere");

  const ComplexMatrix u = propagator(h, t, sched.hbar());
  const FringeScan scan = sample_scan(rho, u, identity(rho.dim()), settings, shots, seed);
  const BargmannEstimate est = measure_bargmann(rho, h, t, settings, shots, seed, sched.hbar());
  const PhaseVisibility exact = visibility_phase(rho, u);

  Json doc = header(cfg);
  doc["T"] = t;
  doc["shots_per_setting"] = shots == kExactShots ? Json("inf") : Json(shots);
  doc["scan"] = io::scan_to_json(scan);
  doc["fit"] = io::fit_to_json(est.fit);
  doc["bargmann"] = {{"s0", est.s0}, {"std_error", est.std_error}};
  doc["exact"] = {{"visibility", exact.visibility},
                  {"phase", exact.phase},
                  {"bargmann_angle", bargmann_angle_from_visibility(exact.visibility)}};
  if (cfg.tau) {
    const double t0 = input.contains("t") ? number_at(input, "t") : 0.0;
    const SpeedEstimate sp = measure_speed(rho, h, t0, *cfg.tau, settings, shots, derive_seed(seed, "speed"),
                                           sched.hbar());
    doc["speed"] = {{"v_hat", sp.v_hat},
                    {"tau", sp.tau},
                    {"std_error", sp.std_error},
                    {"v_true", sp.v_true ? Json(*sp.v_true) : Json(nullptr)}};
  }
  return doc;
}

Json cmd_reproduce(const RunConfig& cfg) {
  Json doc = header(cfg);
  doc["sections"] = Json::array();
  const std::string& w = cfg.which;
  if (w != "all" && w != "qubit-example" && w != "cptp-example" && w != "saturation-family")
    throw Error(ErrorKind::ParseError, "unknown reproduce target " + w);
  if (w == "all" || w == "qubit-example") doc["sections"].push_back(reproduce_qubit(cfg));
  if (w == "all" || w == "cptp-example") doc["sections"].push_back(reproduce_cptp(cfg));
  if (w == "all" || w == "saturation-family") doc["sections"].push_back(reproduce_saturation(cfg));
  std::size_t mismatches = 0, failures = 0;
  for (const Json& s : doc["sections"])
    for (const Json& e : s["entries"]) {
      mismatches += e["verdict"] == "mismatch";
      failures += e["verdict"] == "fail";
    }
  doc["mismatches"] = mismatches;
  doc["failed_checks"] = failures;
  return doc;
}

Json cmd_sweep(const RunConfig& cfg) {
  const SweepSpec& s = cfg.sweep;
  if (s.dim_min < 1 || s.dim_max < s.dim_min) throw Error(ErrorKind::InvalidArgument, "bad dimension range");
  if (!(s.t_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "--t-max must be positive");
  static const std::vector<std::string> state_kinds{"hs", "pure", "maximally-mixed", "mixed"};
  static const std::vector<std::string> h_kinds{"psd", "hermitian", "mixed"};
  if (std::find(state_kinds.begin(), state_kinds.end(), s.states) == state_kinds.end())
    throw Error(ErrorKind::ParseError, "unknown --states " + s.states);
  if (std::find(h_kinds.begin(), h_kinds.end(), s.hamiltonians) == h_kinds.end())
    throw Error(ErrorKind::ParseError, "unknown --hamiltonians " + s.hamiltonians);

  const std::uint64_t base = derive_seed(cfg.seed, "sweep");
  std::vector<Json> rows(s.count);
  std::vector<std::string> errors(s.count);
  unsigned workers = s.threads ? s.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, s.count)));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < s.count; i += workers) {
        try {
          rows[i] = sweep_row(cfg, i, derive_seed(base, i));
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < s.count; ++i)
    if (!errors[i].empty()) throw Error(ErrorKind::InvalidArgument, fmt::format("instance {}: {}", i, errors[i]));

  std::size_t violations = 0;
  double min_slack = kInfiniteBound;
  for (const Json& r : rows) {
    if (r["min_slack"].is_number()) {
      min_slack = std::min(min_slack, r["min_slack"].get<double>());
      violations += r["min_slack"].get<double>() < -1e-9;
    }
  }
  Json doc = header(cfg);
  doc["spec"] = {{"count", s.count},
                 {"dim_min", s.dim_min},
                 {"dim_max", s.dim_max},
                 {"t_max", s.t_max},
                 {"states", s.states},
                 {"hamiltonians", s.hamiltonians}};
  doc["summary"] = {{"min_slack", finite_or_null(min_slack)}, {"violations", violations}};
  doc["rows"] = rows;
  return doc;
}

void render(const RunConfig& cfg, const Json& doc, std::ostream& os) {
  const Format f = cfg.format.value_or(default_format(cfg.command));
  if (f == Format::Json) {
    os << doc.dump(2) << '\n';
    return;
  }
  if (cfg.command == "bound") {
    std::vector<Json> rows(doc["reports"].begin(), doc["reports"].end());
    std::vector<std::string> cols{"instance"};
    for (const std::string& k : scalar_keys(rows.front()))
      if (k != "instance") cols.push_back(k);
    if (f == Format::Table) {
      for (const Json& r : rows) {
        os << "instance " << r["instance"].get<std::size_t>() << '\n';
        write_record(os, r, f);
      }
    } else {
      write_rows(os, cols, rows, f);
    }
  } else if (cfg.command == "sweep") {
    std::vector<Json> rows(doc["rows"].begin(), doc["rows"].end());
    write_rows(os, kSweepColumns, rows, f);
  } else if (cfg.command == "reproduce") {
    std::vector<Json> rows;
    for (const Json& s : doc["sections"])
      for (Json e : s["entries"]) {
        e["section"] = s["name"];
        rows.push_back(std::move(e));
      }
    write_rows(os, kAuditColumns, rows, f);
  } else if (cfg.command == "interfere" && f == Format::Csv) {
    io::write_scan_csv(os, scan_from_doc(doc["scan"]));
  } else {
    Json flat = doc;
    flat.erase("final_state");
    flat.erase("output_state");
    flat.erase("scan");
    write_record(os, flat, f);
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Quantum speed limits on unitary orbits of mixed states"};
  app.require_subcommand(1);

  std::string format;
  auto common = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("--input,-i", cfg.input_path, "Input JSON file");
    if (needs_input) in->required();
    sub->add_option("--output,-o", cfg.output_path, "Write output here instead of stdout");
    sub->add_option("--format,-f", format, "json | csv | table")->check(CLI::IsMember({"json", "csv", "table"}));
    sub->add_option("--seed", cfg.seed, "Top-level RNG seed");
    sub->add_option("--hbar", cfg.hbar, "Default hbar for inputs that do not set one")
        ->check(CLI::PositiveNumber);
    sub->add_option("--shots", cfg.shots, "Shots per phase setting, 0 for exact probabilities");
    sub->add_option("--tau", cfg.tau, "Delay for the speed measurement")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", cfg.tolerance, "Verdict tolerance");
    sub->add_flag("--deterministic", cfg.deterministic, "Omit the timestamp");
  };
  common(app.add_subcommand("bound", "Time bounds for (state, Hamiltonian, T)"), true);
  common(app.add_subcommand("metric", "Visibility, phase, distance and angles along an orbit"), true);
  common(app.add_subcommand("channel", "Kraus channels, dilations and the CPTP bound"), true);
  common(app.add_subcommand("interfere", "Simulated interferometer scan and estimates"), true);
  auto* reproduce = app.add_subcommand("reproduce", "Recompute the worked examples");
  common(reproduce, false);
  reproduce->add_option("which", cfg.which, "qubit-example | cptp-example | saturation-family | all")
      ->check(CLI::IsMember({"qubit-example", "cptp-example", "saturation-family", "all"}));
  auto* sweep = app.add_subcommand("sweep", "Random-instance bound sweep");
  common(sweep, false);
  sweep->add_option("--count", cfg.sweep.count, "Number of instances");
  sweep->add_option("--dim-min", cfg.sweep.dim_min, "Smallest dimension")->check(CLI::PositiveNumber);
  sweep->add_option("--dim-max", cfg.sweep.dim_max, "Largest dimension")->check(CLI::PositiveNumber);
  sweep->add_option("--t-max", cfg.sweep.t_max, "Times drawn from (0, t-max]");
  sweep->add_option("--states", cfg.sweep.states, "hs | pure | maximally-mixed | mixed");
  sweep->add_option("--hamiltonians", cfg.sweep.hamiltonians, "psd | hermitian | mixed");
  sweep->add_option("--threads", cfg.sweep.threads, "Worker threads, 0 for all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_json("ParseError", e.what()).dump() << '\n';
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (format == "json") cfg.format = Format::Json;
  if (format == "csv") cfg.format = Format::Csv;
  if (format == "table") cfg.format = Format::Table;

  try {
    Json doc;
    if (cfg.command == "reproduce") {
      doc = cmd_reproduce(cfg);
    } else if (cfg.command == "sweep") {
      doc = cmd_sweep(cfg);
    } else {
      const Json input = read_input(cfg);
      if (cfg.command == "bound") doc = cmd_bound(cfg, input);
      if (cfg.command == "metric") doc = cmd_metric(cfg, input);
      if (cfg.command == "channel") doc = cmd_channel(cfg, input);
      if (cfg.command == "interfere") doc = cmd_interfere(cfg, input);
    }
    std::ostringstream rendered;
    render(cfg, doc, rendered);
    if (cfg.output_path) {
      std::ofstream file(*cfg.output_path);
      if (!file) throw Error(ErrorKind::ParseError, "cannot open output file " + *cfg.output_path);
      file << rendered.str();
    } else {
      out << rendered.str();
    }
  } catch (const Error& e) {
    err << error_json(to_string(e.kind()), e.what()).dump() << '\n';
    return e.kind() == ErrorKind::ParseError ? 2 : 1;
  } catch (const Json::exception& e) {
    err << error_json("ParseError", e.what()).dump() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace orbitqsl::cli
