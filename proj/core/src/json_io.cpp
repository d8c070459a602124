#include "orbitqsl/json_io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace orbitqsl::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) parse_error(std::string(what) + " must be a number");
  return j.get<double>();
}

Eigen::MatrixXd real_rows(const Json& rows, std::size_t dim, const char* what) {
  if (!rows.is_array() || rows.size() != dim) {
    parse_error(std::string(what) + " must be an array of " + std::to_string(dim) + " rows");
  }
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd out(d, d);
  for (std::size_t i = 0; i < dim; ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != dim) {
      parse_error(std::string(what) + " row " + std::to_string(i) + " must have " +
                  std::to_string(dim) + " entries");
    }
    for (std::size_t k = 0; k < dim; ++k) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = number(row[k], what);
    }
  }
  return out;
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

void put_bound(Json& out, Json& reasons, const char* key, const std::optional<double>& value) {
  if (!value) {
    out[key] = nullptr;
    if (!reasons.contains(key)) reasons[key] = "not applicable";
    return;
  }
  out[key] = finite_or_null(*value);
  if (!std::isfinite(*value) && !reasons.contains(key)) reasons[key] = "unbounded";
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const Json& dim_field = field(j, "dim");
  if (!dim_field.is_number_integer() || dim_field.get<long long>() < 1) {
    parse_error("\"dim\" must be a positive integer");
  }
  const auto dim = static_cast<std::size_t>(dim_field.get<long long>());
  const Eigen::MatrixXd re = real_rows(field(j, "re"), dim, "\"re\"");
  const Eigen::MatrixXd im = j.contains("im") ? real_rows(j.at("im"), dim, "\"im\"")
                                              : Eigen::MatrixXd::Zero(re.rows(), re.cols());
  ComplexMatrix out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

DensityMatrix state_from_json(const Json& j, const Tolerances& tol) {
  if (j.is_object() && j.contains("bloch")) {
    const Json& b = j.at("bloch");
    if (!b.is_array() || b.size() != 3) parse_error("\"bloch\" must be a 3-element array");
    return density_from_bloch({number(b[0], "bloch"), number(b[1], "bloch"), number(b[2], "bloch")});
  }
  return DensityMatrix::validate(matrix_from_json(j), tol);
}

Json state_to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix()); }

HamiltonianSchedule schedule_from_json(const Json& j, double default_hbar, const Tolerances& tol) {
  const double hbar = j.is_object() && j.contains("hbar") ? number(j.at("hbar"), "hbar") : default_hbar;
  if (j.is_object() && j.contains("samples")) {
    const Json& arr = j.at("samples");
    if (!arr.is_array()) parse_error("\"samples\" must be an array");
    std::vector<HamiltonianSchedule::Sample> samples;
    for (const Json& s : arr) {
      samples.push_back({number(field(s, "t"), "sample time"), matrix_from_json(field(s, "H"))});
    }
    return HamiltonianSchedule::sampled(std::move(samples), hbar, tol);
  }
  if (j.is_object() && j.contains("hamiltonian")) {
    return HamiltonianSchedule::constant(matrix_from_json(j.at("hamiltonian")), hbar, tol);
  }
  return HamiltonianSchedule::constant(matrix_from_json(j), hbar, tol);
}

KrausChannel channel_from_json(const Json& j) {
  const Json& arr = field(j, "kraus");
  if (!arr.is_array()) parse_error("\"kraus\" must be an array of matrices");
  std::vector<ComplexMatrix> ops;
  for (const Json& m : arr) ops.push_back(matrix_from_json(m));
  return KrausChannel::from_operators(std::move(ops));
}

Json channel_to_json(const KrausChannel& ch) {
  Json arr = Json::array();
  for (const ComplexMatrix& e : ch.operators()) arr.push_back(matrix_to_json(e));
  return Json{{"kraus", std::move(arr)}};
}

DilatedSystem dilated_from_json(const Json& j, double default_hbar) {
  DilatedSystem sys;
  sys.H_AB = matrix_from_json(field(j, "H_AB"));
  const Json& db = field(j, "dB");
  if (!db.is_number_integer() || db.get<long long>() < 1) parse_error("\"dB\" must be a positive integer");
  sys.ancilla_dim = static_cast<std::size_t>(db.get<long long>());
  if (j.contains("nu")) {
    if (!j.at("nu").is_number_integer() || j.at("nu").get<long long>() < 0) {
      parse_error("\"nu\" must be a non-negative integer");
    }
    sys.nu = static_cast<std::size_t>(j.at("nu").get<long long>());
  }
  sys.hbar = j.contains("hbar") ? number(j.at("hbar"), "hbar") : default_hbar;
  if (j.contains("ancilla")) {
    const Json& a = j.at("ancilla");
    if (!a.is_array()) parse_error("\"ancilla\" must be an array of [re, im] pairs");
    ComplexVector e(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].is_array() || a[k].size() != 2) parse_error("ancilla entries must be [re, im]");
      e[static_cast<Eigen::Index>(k)] = Complex(number(a[k][0], "ancilla"), number(a[k][1], "ancilla"));
    }
    sys.ancilla_state = e;
  }
  sys.validate();
  return sys;
}

Json dilated_to_json(const DilatedSystem& sys) {
  Json out{{"H_AB", matrix_to_json(sys.H_AB)},
           {"dB", sys.ancilla_dim},
           {"nu", sys.nu},
           {"hbar", sys.hbar}};
  if (sys.ancilla_state) {
    Json a = Json::array();
    for (Eigen::Index k = 0; k < sys.ancilla_state->size(); ++k) {
      a.push_back({(*sys.ancilla_state)[k].real(), (*sys.ancilla_state)[k].imag()});
    }
    out["ancilla"] = std::move(a);
  }
  return out;
}

Json measured_to_json(const MeasuredSummary& m) {
  Json out{{"visibility", m.visibility},
           {"visibility_stderr", m.visibility_stderr},
           {"phase", m.phase},
           {"bargmann_angle", m.bargmann_angle},
           {"bargmann_angle_stderr", m.bargmann_stderr},
           {"speed", m.speed},
           {"speed_stderr", m.speed_stderr},
           {"tau", m.tau},
           {"shots", m.shots == kExactShots ? Json("inf") : Json(m.shots)},
           {"mt_bound", finite_or_null(m.mt_bound)},
           {"mt_bound_stderr", finite_or_null(m.mt_stderr)}};
  out["ml_bound"] = m.ml_bound ? finite_or_null(*m.ml_bound) : Json(nullptr);
  out["ml_bound_stderr"] = m.ml_stderr ? finite_or_null(*m.ml_stderr) : Json(nullptr);
  return out;
}

Json report_to_json(const BoundReport& r) {
  Json reasons = Json::object();
  for (const auto& [key, why] : r.reasons) reasons[key] = why;
  Json out{{"T", r.T},
           {"hbar", r.hbar},
           {"visibility", r.visibility},
           {"phase", r.phase},
           {"bargmann_angle", r.bargmann_angle},
           {"bures_angle", r.bures_angle},
           {"fidelity", r.fidelity},
           {"delta_H", r.delta_H},
           {"mean_H", r.mean_H},
           {"mean_abs_E", r.mean_abs_E},
           {"re_part", r.re_part},
           {"im_part", r.im_part},
           {"E_DE", r.E_DE},
           {"h_psd", r.h_psd},
           {"time_dependent", r.time_dependent}};
  put_bound(out, reasons, "mt_bound", r.mt_bound);
  put_bound(out, reasons, "ml_bound", r.ml_bound);
  put_bound(out, reasons, "combined_bound", r.combined_bound);
  put_bound(out, reasons, "chau_bound", r.chau_bound);
  put_bound(out, reasons, "improved_chau_bound", r.improved_chau_bound);
  put_bound(out, reasons, "bures_baseline_bound", r.bures_baseline_bound);
  out["reasons"] = std::move(reasons);
  if (r.measured) out["measured"] = measured_to_json(*r.measured);
  return out;
}

Json scan_to_json(const FringeScan& scan) {
  Json out{{"settings", scan.settings},
           {"shots_per_setting", scan.exact() ? Json("inf") : Json(scan.shots_per_setting)},
           {"frequencies", scan.frequencies},
           {"seed", scan.seed}};
  if (!scan.exact()) out["counts_D"] = scan.counts_d;
  return out;
}

Json fit_to_json(const FringeFit& fit) {
  return Json{{"visibility", fit.estimate.visibility},
              {"phase", fit.estimate.phase},
              {"visibility_stderr", fit.visibility_stderr},
              {"phase_stderr", finite_or_null(fit.phase_stderr)},
              {"offset", fit.offset},
              {"phase_identifiable", fit.phase_identifiable}};
}

void write_scan_csv(std::ostream& os, const FringeScan& scan) {
  os << "chi,counts_D,counts_Dprime,shots\n";
  const auto old_precision = os.precision(17);
  for (std::size_t j = 0; j < scan.settings.size(); ++j) {
    os << scan.settings[j] << ',';
    if (scan.exact()) {
      os << scan.frequencies[j] << ',' << 1.0 - scan.frequencies[j] << ",inf\n";
    } else {
      os << scan.counts_d[j] << ',' << scan.shots_per_setting - scan.counts_d[j] << ','
         << scan.shots_per_setting << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace orbitqsl::io
