// Batch front door: one subcommand per computation, CSV or JSON out.
//
// Exit codes: 0 success, 1 usage error, 2 resource cap, 3 check failure.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kmslab/conformal_measure.hpp"
#include "kmslab/critical_temperature.hpp"
#include "kmslab/errors.hpp"
#include "kmslab/gibbs_representation.hpp"
#include "kmslab/partition_function.hpp"
#include "kmslab/phase.hpp"

namespace {

using nlohmann::json;

// Pinned residual tolerances for the relation checks; CI gates on exit code 3.
constexpr double kTolCuntz = 1e-14;
constexpr double kTolIsometry = 1e-14;
constexpr double kTolCovariance = 1e-13;
constexpr double kTolKms = 1e-10;
constexpr double kTolTrace = 1e-12;
constexpr double kTolCircle = 1e-10;

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Atomic write: stage next to the target, then rename over it.
void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path().empty()
                           ? fs::path(target.string() + ".tmp")
                           : target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << payload;
  }
  fs::rename(tmp, target);
}

struct CheckReport {
  std::string check;
  std::size_t level_cap;
  double beta;
  kmslab::Complex lambda;
  double residual;
  double tolerance;
  bool pass;
};

json to_json(const CheckReport& r) {
  json j;
  j["check"] = r.check;
  j["N"] = r.level_cap;
  j["beta"] = r.beta;
  j["lambda"] = {r.lambda.real(), r.lambda.imag()};
  j["residual"] = r.residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  return j;
}

int run_beta0(double tol, const std::string& format, const std::string& out,
              bool reproducible) {
  const kmslab::CriticalBeta r = kmslab::solve_beta0(tol);
  std::string payload;
  if (format == "csv") {
    if (!reproducible) payload += "# generated " + timestamp_utc() + "\n";
    payload += "lo,hi,midpoint,residual\n";
    payload += kmslab::format_double(r.lo) + "," + kmslab::format_double(r.hi) +
               "," + kmslab::format_double(r.midpoint) + "," +
               kmslab::format_double(r.residual) + "\n";
  } else {
    json j;
    if (!reproducible) j["generated"] = timestamp_utc();
    j["lo"] = r.lo;
    j["hi"] = r.hi;
    j["midpoint"] = r.midpoint;
    j["residual"] = r.residual;
    payload = j.dump(2) + "\n";
  }
  write_output(out, payload);
  return 0;
}

int run_measure(double beta, std::size_t depth, const std::string& format,
                const std::string& out, bool reproducible) {
  const kmslab::CylinderTable t = kmslab::conformal_table(beta, depth);
  std::string payload;
  if (format == "csv") {
    std::ostringstream os;
    if (!reproducible) os << "# generated " << timestamp_utc() << "\n";
    kmslab::write_csv(t, os);
    payload = os.str();
  } else {
    payload = kmslab::to_json(t) + "\n";
  }
  write_output(out, payload);
  return 0;
}

int run_partition(double beta, std::size_t length, const std::string& format,
                  const std::string& out, bool reproducible) {
  const kmslab::PartitionTable t = kmslab::partition_sequence(beta, length);
  std::string payload;
  if (format == "csv") {
    if (!reproducible) payload += "# generated " + timestamp_utc() + "\n";
    payload += "n,Z,partial_M\n";
    for (std::size_t n = 0; n < t.Z.size(); ++n) {
      payload += std::to_string(n) + "," + kmslab::format_double(t.Z[n]) + "," +
                 kmslab::format_double(t.partial_M[n]) + "\n";
    }
  } else {
    json j;
    if (!reproducible) j["generated"] = timestamp_utc();
    j["beta"] = beta;
    j["Z"] = t.Z;
    j["partial_M"] = t.partial_M;
    payload = j.dump(2) + "\n";
  }
  write_output(out, payload);
  return 0;
}

int run_classify(double beta, double tol, const std::string& format,
                 const std::string& out, bool reproducible) {
  const kmslab::PhaseClassification c = kmslab::classify_phase(beta, tol);
  std::string payload;
  if (format == "csv") {
    if (!reproducible) payload += "# generated " + timestamp_utc() + "\n";
    payload += "beta,classification,witness,G_low,G_high\n";
    payload += kmslab::format_double(beta);
    payload += ",";
    payload += kmslab::to_string(c.kind);
    payload += ",";
    payload += kmslab::format_double(c.witness);
    payload += ",";
    payload += c.g_low ? kmslab::format_double(*c.g_low) : "inf";
    payload += ",";
    payload += c.g_high ? kmslab::format_double(*c.g_high) : "inf";
    payload += "\n";
  } else {
    json j;
    if (!reproducible) j["generated"] = timestamp_utc();
    j["beta"] = beta;
    j["classification"] = kmslab::to_string(c.kind);
    j["witness"] = c.witness;
    j["g_low"] = c.g_low ? json(*c.g_low) : json();
    j["g_high"] = c.g_high ? json(*c.g_high) : json();
    payload = j.dump(2) + "\n";
  }
  write_output(out, payload);
  return 0;
}

int run_rep_check(double beta, std::size_t level_cap, std::size_t quadrature,
                  const std::string& out, bool reproducible) {
  const kmslab::Complex lambda = std::polar(1.0, 2.0 * std::numbers::pi / 7.0);
  const kmslab::TruncatedRep rep = kmslab::build_rep(beta, lambda, level_cap);

  std::vector<CheckReport> reports;
  const kmslab::CuntzReport cz = kmslab::check_cuntz(rep);
  reports.push_back({"cuntz_completeness", level_cap, beta, lambda,
                     cz.completeness_residual, kTolCuntz,
                     cz.completeness_residual <= kTolCuntz});
  reports.push_back({"isometry_interior", level_cap, beta, lambda,
                     cz.isometry_interior_residual, kTolIsometry,
                     cz.isometry_interior_residual <= kTolIsometry});
  for (const double t : {0.37, 1.0}) {
    const double r = kmslab::check_covariance(rep, t);
    reports.push_back({"covariance_t=" + kmslab::format_double(t), level_cap,
                       beta, lambda, r, kTolCovariance, r <= kTolCovariance});
  }
  {
    const kmslab::PartitionTable pt = kmslab::partition_sequence(beta, level_cap);
    const double r = std::abs(rep.trace() - (1.0 + pt.partial_M[level_cap]));
    reports.push_back({"trace_matches_partition", level_cap, beta, lambda, r,
                       kTolTrace, r <= kTolTrace});
  }
  {
    double worst = 0.0;
    for (std::size_t lu = 0; lu <= 3; ++lu) {
      for (std::size_t lv = 0; lv <= 3; ++lv) {
        for (const kmslab::Word& u : kmslab::all_words(lu)) {
          for (const kmslab::Word& v : kmslab::all_words(lv)) {
            const kmslab::CircleAverage ca =
                kmslab::circle_average(beta, level_cap, quadrature, u, v);
            worst = std::max(worst,
                             std::abs(ca.quadrature_mean - ca.reference));
          }
        }
      }
    }
    reports.push_back({"circle_average", level_cap, beta, lambda, worst,
                       kTolCircle, worst <= kTolCircle});
  }

  json j;
  if (!reproducible) j["generated"] = timestamp_utc();
  json arr = json::array();
  bool all_pass = true;
  for (const CheckReport& r : reports) {
    arr.push_back(to_json(r));
    all_pass = all_pass && r.pass;
  }
  j["checks"] = std::move(arr);
  write_output(out, j.dump(2) + "\n");
  return all_pass ? 0 : 3;
}

int run_kms_check(double beta, std::size_t level_cap, const std::string& out,
                  bool reproducible) {
  const kmslab::Complex lambda = std::polar(1.0, 2.0 * std::numbers::pi / 7.0);
  const kmslab::TruncatedRep rep = kmslab::build_rep(beta, lambda, level_cap);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const kmslab::SparseOp a = kmslab::random_unit_sparse(rep.dim(), seed);
    const kmslab::SparseOp b = kmslab::random_unit_sparse(rep.dim(), seed + 1000);
    worst = std::max(worst, kmslab::check_kms(rep, a, b));
  }
  const CheckReport r{"kms_modular_relation", level_cap, beta, lambda,
                      worst, kTolKms, worst <= kTolKms};
  json j;
  if (!reproducible) j["generated"] = timestamp_utc();
  j["checks"] = json::array({to_json(r)});
  write_output(out, j.dump(2) + "\n");
  return r.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the KMS phase structure of the "
               "gauge-type flow on the Cuntz algebra O_2"};
  app.require_subcommand(1);

  std::string format = "csv";
  std::string out_path;
  bool reproducible = false;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "Output path (default: stdout)");
  app.add_flag("--reproducible", reproducible,
               "Strip timestamps; pin scheduling-independent output order");

  double beta = 2.0;
  double tol = 1e-10;
  std::size_t depth = 8;
  std::size_t level_cap = 12;
  std::size_t quadrature = 64;
  unsigned jobs = 1;

  auto* beta0_cmd = app.add_subcommand("beta0", "Certify the critical inverse temperature");
  beta0_cmd->add_option("--tol", tol, "Interval width target (>= 1e-12)");

  auto* classify_cmd = app.add_subcommand("classify", "Trichotomy decision at one beta");
  classify_cmd->add_option("--beta", beta)->required();
  classify_cmd->add_option("--tol", tol, "Series bracket tolerance");

  auto* measure_cmd = app.add_subcommand("measure", "Export the conformal cylinder table");
  measure_cmd->add_option("--beta", beta)->required();
  measure_cmd->add_option("--depth", depth, "Table depth (<= 16)");

  auto* partition_cmd = app.add_subcommand("partition", "Export the renewal sequence");
  partition_cmd->add_option("--beta", beta)->required();
  partition_cmd->add_option("--depth", depth, "Sequence length N");

  auto* rep_cmd = app.add_subcommand("rep-check", "Relation checks for the truncated representation");
  rep_cmd->add_option("--beta", beta)->required();
  rep_cmd->add_option("--level-cap", level_cap, "Retained levels N (<= 22)");
  rep_cmd->add_option("--quadrature", quadrature, "Circle nodes Q (>= 2)");

  auto* kms_cmd = app.add_subcommand("kms-check", "Modular relation on random sparse pairs");
  kms_cmd->add_option("--beta", beta)->required();
  kms_cmd->add_option("--level-cap", level_cap, "Retained levels N (<= 22)");

  auto* scan_cmd = app.add_subcommand("scan", "Phase diagram over a beta grid");
  for (CLI::App* sub : {beta0_cmd, classify_cmd, measure_cmd, partition_cmd,
                        rep_cmd, kms_cmd, scan_cmd}) {
    sub->fallthrough();  // global --format/--out/--reproducible after the verb
  }
  double beta_start = 0.0, beta_stop = 0.0, beta_step = 0.0;
  bool have_single = false;
  auto* single_opt = scan_cmd->add_option("--beta", beta, "Single grid point");
  scan_cmd->add_option("--beta-start", beta_start);
  scan_cmd->add_option("--beta-stop", beta_stop);
  scan_cmd->add_option("--beta-step", beta_step);
  scan_cmd->add_option("--tol", tol, "Series/mass tolerance");
  scan_cmd->add_option("--depth", depth, "Nonexistence probe depth")
      ->default_val(std::size_t{1'000'000});
  scan_cmd->add_option("--jobs", jobs, "Parallel grid evaluations");

  try {
    app.parse(argc, argv);
    have_single = single_opt->count() > 0;

    if (beta0_cmd->parsed()) {
      return run_beta0(beta0_cmd->count("--tol") ? tol : 1e-10, format,
                       out_path, reproducible);
    }
    if (classify_cmd->parsed()) {
      return run_classify(beta, classify_cmd->count("--tol") ? tol : 1e-10,
                          format, out_path, reproducible);
    }
    if (measure_cmd->parsed()) {
      return run_measure(beta, depth, format, out_path, reproducible);
    }
    if (partition_cmd->parsed()) {
      return run_partition(beta, depth, format, out_path, reproducible);
    }
    if (rep_cmd->parsed()) {
      return run_rep_check(beta, level_cap, quadrature, out_path, reproducible);
    }
    if (kms_cmd->parsed()) {
      return run_kms_check(beta, level_cap, out_path, reproducible);
    }
    if (scan_cmd->parsed()) {
      kmslab::ScanConfig config;
      if (have_single) {
        config.single_beta = beta;
      } else {
        config.beta_start = beta_start;
        config.beta_stop = beta_stop;
        config.beta_step = beta_step;
      }
      config.tol = scan_cmd->count("--tol") ? tol : 1e-8;
      config.probe_depth = depth;
      config.jobs = jobs;
      const auto rows = kmslab::scan(config);
      const std::string payload = format == "csv"
                                      ? kmslab::scan_csv(rows, reproducible)
                                      : kmslab::scan_json(rows, reproducible) + "\n";
      write_output(out_path, payload);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const kmslab::ResourceLimit& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const kmslab::DivergentSeries& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
