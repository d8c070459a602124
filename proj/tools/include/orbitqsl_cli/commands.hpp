#pragma once

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "orbitqsl/json_io.hpp"

namespace orbitqsl::cli {

using io::Json;

enum class Format { Json, Csv, Table };

struct SweepSpec {
  std::size_t count = 100;
  std::size_t dim_min = 2;
  std::size_t dim_max = 4;
  double t_max = 4.0 * std::numbers::pi;
  std::string states = "hs";          // hs | pure | maximally-mixed | mixed
  std::string hamiltonians = "mixed";  // psd | hermitian | mixed
  unsigned threads = 0;                // 0 = hardware concurrency
};

struct RunConfig {
  std::string command;
  std::optional<std::string> input_path;
  std::optional<std::string> output_path;
  std::optional<Format> format;
  std::uint64_t seed = 42;
  std::optional<double> hbar;
  std::optional<std::uint64_t> shots;
  std::optional<double> tau;
  bool deterministic = false;
  double tolerance = 1e-9;
  std::string which = "all";
  SweepSpec sweep;
};

/// Entry point shared by main() and the tests. Returns the process exit code:
/// 0 on success, 1 on validation errors, 2 on usage and parse errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Each command returns its full JSON document; rendering happens separately.
Json cmd_bound(const RunConfig& cfg, const Json& input);
Json cmd_metric(const RunConfig& cfg, const Json& input);
Json cmd_channel(const RunConfig& cfg, const Json& input);
Json cmd_interfere(const RunConfig& cfg, const Json& input);
Json cmd_reproduce(const RunConfig& cfg);
Json cmd_sweep(const RunConfig& cfg);

/// Writes `doc` in the requested format. CSV and table layouts depend on the command.
void render(const RunConfig& cfg, const Json& doc, std::ostream& os);

}  // namespace orbitqsl::cli
