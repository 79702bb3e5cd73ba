#include "kmslab/phase.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "kmslab/conformal_measure.hpp"
#include "kmslab/critical_temperature.hpp"
#include "kmslab/errors.hpp"
#include "kmslab/partition_function.hpp"

namespace kmslab {

const char* to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::NoKMS: return "NoKMS";
    case PhaseKind::UniqueCritical: return "UniqueCritical";
    case PhaseKind::CircleSimplex: return "CircleSimplex";
  }
  return "?";
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

PhaseClassification classify_phase(double beta, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("classify_phase: tol must be > 0");
  }
  PhaseClassification out;
  if (beta <= 1.0) {
    out.kind = PhaseKind::NoKMS;
    out.witness = std::numeric_limits<double>::max();
    return out;
  }
  const SeriesResult g = series_G(beta, tol);
  out.g_low = g.lower();
  out.g_high = g.upper();
  if (g.lower() > 1.0) {
    out.kind = PhaseKind::NoKMS;
    out.witness = g.lower() - 1.0;
  } else if (g.upper() < 1.0) {
    out.kind = PhaseKind::CircleSimplex;
    out.witness = 1.0 - g.upper();
  } else {
    out.kind = PhaseKind::UniqueCritical;
    out.witness = std::max(1.0 - g.lower(), g.upper() - 1.0);
  }
  return out;
}

std::vector<double> make_grid(const ScanConfig& config) {
  if (config.single_beta) return {*config.single_beta};
  if (!(config.beta_step > 0.0) || config.beta_stop < config.beta_start) {
    throw std::invalid_argument("invalid grid");
  }
  std::vector<double> grid;
  const double span = config.beta_stop - config.beta_start;
  const auto count =
      static_cast<std::size_t>(std::floor(span / config.beta_step + 1e-9)) + 1;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back(config.beta_start + static_cast<double>(i) * config.beta_step);
  }
  if (grid.empty()) throw std::invalid_argument("invalid grid");
  return grid;
}

std::vector<ScanRow> scan(const ScanConfig& config) {
  const std::vector<double> grid = make_grid(config);
  std::vector<ScanRow> rows(grid.size());

  const auto work = [&](std::size_t i) {
    const double beta = grid[i];
    ScanRow row;
    row.beta = beta;
    const PhaseClassification cls = classify_phase(beta, config.tol);
    row.kind = cls.kind;
    row.g_low = cls.g_low;
    row.g_high = cls.g_high;

    const TotalMass tm = total_mass(beta, config.tol, config.mass_cap);
    row.mass_gap = tm.doubling_gap;
    if (tm.converged) row.partial_mass = tm.value;

    const NonexistenceReport rep = detect_nonexistence(beta, config.probe_depth);
    row.first_negative_depth = rep.first_negative_depth;
    rows[i] = row;
  };

  const unsigned jobs = std::max(1u, config.jobs);
  if (jobs == 1 || grid.size() <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(grid.size()));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < grid.size();
             i = next.fetch_add(1)) {
          work(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string scan_csv(const std::vector<ScanRow>& rows, bool reproducible) {
  std::string out;
  if (!reproducible) {
    out += "# generated ";
    out += timestamp_utc();
    out += '\n';
  }
  out += "beta,classification,G_low,G_high,partial_M_or_flag,first_negative_depth_or_none\n";
  for (const ScanRow& r : rows) {
    out += format_double(r.beta);
    out += ',';
    out += to_string(r.kind);
    out += ',';
    out += r.g_low ? format_double(*r.g_low) : "inf";
    out += ',';
    out += r.g_high ? format_double(*r.g_high) : "inf";
    out += ',';
    out += r.partial_mass ? format_double(*r.partial_mass) : "not-converged";
    out += ',';
    out += r.first_negative_depth ? std::to_string(*r.first_negative_depth)
                                  : "none";
    out += '\n';
  }
  return out;
}

std::string scan_json(const std::vector<ScanRow>& rows, bool reproducible) {
  nlohmann::json j;
  if (!reproducible) j["generated"] = timestamp_utc();
  nlohmann::json arr = nlohmann::json::array();
  for (const ScanRow& r : rows) {
    nlohmann::json row;
    row["beta"] = r.beta;
    row["classification"] = to_string(r.kind);
    row["g_low"] = r.g_low ? nlohmann::json(*r.g_low) : nlohmann::json();
    row["g_high"] = r.g_high ? nlohmann::json(*r.g_high) : nlohmann::json();
    row["partial_M"] =
        r.partial_mass ? nlohmann::json(*r.partial_mass) : nlohmann::json();
    row["mass_gap"] = r.mass_gap;
    row["first_negative_depth"] = r.first_negative_depth
                                      ? nlohmann::json(*r.first_negative_depth)
                                      : nlohmann::json();
    arr.push_back(std::move(row));
  }
  j["rows"] = std::move(arr);
  return j.dump(2);
}

}  // namespace kmslab
