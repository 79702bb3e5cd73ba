#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace kmslab {

enum class PhaseKind { NoKMS, UniqueCritical, CircleSimplex };
const char* to_string(PhaseKind kind);

/// Trichotomy decision backed by the certified series bracket: NoKMS when the
/// bracket sits above 1, CircleSimplex when below, UniqueCritical when it
/// straddles 1 within the declared tolerance. Below beta = 1 the series
/// diverges and the decision is NoKMS with an unbounded witness.
struct PhaseClassification {
  PhaseKind kind = PhaseKind::NoKMS;
  double witness = 0.0;  // certified distance of the bracket from 1
  std::optional<double> g_low;
  std::optional<double> g_high;
};

PhaseClassification classify_phase(double beta, double tol);

struct ScanConfig {
  double beta_start = 0.0;
  double beta_stop = 0.0;
  double beta_step = 0.0;
  std::optional<double> single_beta;
  double tol = 1e-8;
  std::size_t probe_depth = 1'000'000;
  std::size_t mass_cap = 32'768;
  unsigned jobs = 1;
};

/// Grid points, or a one-point grid for a single beta. Throws
/// std::invalid_argument("invalid grid") on a bad specification.
std::vector<double> make_grid(const ScanConfig& config);

struct ScanRow {
  double beta = 0.0;
  PhaseKind kind = PhaseKind::NoKMS;
  std::optional<double> g_low;
  std::optional<double> g_high;
  std::optional<double> partial_mass;  // absent = flagged divergent
  double mass_gap = 0.0;
  std::optional<std::size_t> first_negative_depth;
};

/// One row per grid point; rows are independent of evaluation order and of
/// the configured parallelism.
std::vector<ScanRow> scan(const ScanConfig& config);

std::string scan_csv(const std::vector<ScanRow>& rows, bool reproducible);
std::string scan_json(const std::vector<ScanRow>& rows, bool reproducible);

/// Shortest round-trip decimal rendering, shared by all CSV writers.
std::string format_double(double x);

}  // namespace kmslab
