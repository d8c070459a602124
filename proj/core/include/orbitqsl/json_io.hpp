#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "orbitqsl/cptp.hpp"
#include "orbitqsl/interferometer.hpp"
#include "orbitqsl/numerics.hpp"
#include "orbitqsl/speed_limits.hpp"
#include "orbitqsl/states.hpp"

namespace orbitqsl::io {

using Json = nlohmann::json;

// All readers throw Error(ParseError) on schema violations and let validation
// errors (NotHermitian, TraceNotOne, ...) through unchanged.

/// {"dim": n, "re": [[...]], "im": [[...]]}, row-major. "im" may be omitted for real matrices.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// Either a full matrix or {"bloch": [x, y, z]}.
DensityMatrix state_from_json(const Json& j, const Tolerances& tol = kDefaultTolerances);
Json state_to_json(const DensityMatrix& rho);

/// A bare matrix (constant), or {"hamiltonian": matrix, "hbar": x}, or
/// {"samples": [{"t": t, "H": matrix}, ...], "hbar": x}.
HamiltonianSchedule schedule_from_json(const Json& j, double default_hbar = 1.0,
                                       const Tolerances& tol = kDefaultTolerances);

/// {"kraus": [matrix, ...]}
KrausChannel channel_from_json(const Json& j);
Json channel_to_json(const KrausChannel& ch);

/// {"H_AB": matrix, "dB": n, "nu": k, "hbar": x}; optional "ancilla": [[re, im], ...].
DilatedSystem dilated_from_json(const Json& j, double default_hbar = 1.0);
Json dilated_to_json(const DilatedSystem& sys);

/// Non-finite values serialize as null with an entry under "reasons".
Json report_to_json(const BoundReport& r);
Json measured_to_json(const MeasuredSummary& m);
Json scan_to_json(const FringeScan& scan);
Json fit_to_json(const FringeFit& fit);

/// chi,counts_D,counts_Dprime,shots. Exact scans write probabilities in the count
/// columns and "inf" for shots.
void write_scan_csv(std::ostream& os, const FringeScan& scan);

}  // namespace orbitqsl::io
