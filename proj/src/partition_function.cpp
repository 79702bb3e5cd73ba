#include "kmslab/partition_function.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

#include "kmslab/critical_temperature.hpp"
#include "kmslab/errors.hpp"
#include "kmslab/numeric.hpp"

namespace kmslab {

namespace {

// Weights a_k = exp(-beta*s_k), k = 1..N, with a compensated harmonic prefix.
Eigen::VectorXd renewal_weights(double beta, std::size_t N) {
  Eigen::VectorXd a(N + 1);
  a[0] = 0.0;
  KahanSum s;
  for (std::size_t k = 1; k <= N; ++k) {
    s.add(1.0 / static_cast<double>(k));
    a[static_cast<Eigen::Index>(k)] = std::exp(-beta * s.value());
  }
  return a;
}

struct RenewalState {
  double beta = 0.0;
  Eigen::VectorXd a;  // weights, index 1..N
  Eigen::VectorXd Z;  // Z_0..Z_N
  std::vector<double> partial;  // prefix sums of Z_1..
  KahanSum prefix;

  void grow(std::size_t N) {
    const auto old = static_cast<std::size_t>(Z.size());  // entries 0..old-1
    if (N + 1 <= old) return;
    a = renewal_weights(beta, N);
    Z.conservativeResize(static_cast<Eigen::Index>(N + 1));
    partial.resize(N + 1, 0.0);
    if (old == 0) {
      Z[0] = 1.0;
      partial[0] = 0.0;
    }
    for (std::size_t n = std::max<std::size_t>(old, 1); n <= N; ++n) {
      const auto ni = static_cast<Eigen::Index>(n);
      const double zn = a.segment(1, ni).dot(Z.head(ni).reverse());
      if (!std::isfinite(zn)) {
        throw std::overflow_error("renewal sequence overflow at n=" +
                                  std::to_string(n) + " (beta=" +
                                  std::to_string(beta) + ")");
      }
      Z[ni] = zn;
      prefix.add(zn);
      partial[n] = prefix.value();
    }
  }
};

}  // namespace

PartitionTable partition_sequence(double beta, std::size_t N) {
  if (N > kMaxPartitionLength) {
    throw ResourceLimit("partition length cap is " +
                        std::to_string(kMaxPartitionLength));
  }
  RenewalState st;
  st.beta = beta;
  st.grow(N);
  PartitionTable t;
  t.beta = beta;
  t.Z.assign(st.Z.data(), st.Z.data() + N + 1);
  t.partial_M = std::move(st.partial);
  return t;
}

double partition_bruteforce(double beta, std::size_t n) {
  if (n > kMaxBruteforceLevel) {
    throw ResourceLimit("bruteforce level cap is " +
                        std::to_string(kMaxBruteforceLevel));
  }
  KahanSum acc;
  for (const TailPoint& y : enumerate_level_set(n)) {
    acc.add(std::exp(-beta * birkhoff_sum(y, n)));
  }
  return require_finite(acc.value(), "partition_bruteforce");
}

TotalMass total_mass(double beta, double rel_tol, std::size_t cap) {
  if (!(rel_tol > 0.0)) {
    throw std::invalid_argument("total_mass: rel_tol must be > 0");
  }
  cap = std::min(cap, kMaxPartitionLength);
  RenewalState st;
  st.beta = beta;

  // Overflow of the renewal values is itself evidence of divergence; report
  // the last finite prefix instead of erroring out.
  const auto grow_or_flag = [&](std::size_t n) {
    try {
      st.grow(n);
      return true;
    } catch (const std::overflow_error&) {
      return false;
    }
  };

  TotalMass out;
  std::size_t N = std::min<std::size_t>(64, cap);
  if (!grow_or_flag(N)) {
    out.value = st.prefix.value();
    out.terms = N;
    return out;
  }
  double prev = st.partial[N];
  while (true) {
    if (N >= cap || prev > 1e9) {
      out.value = prev;
      out.terms = N;
      out.converged = false;
      return out;
    }
    const std::size_t next = std::min(2 * N, cap);
    if (!grow_or_flag(next)) {
      out.value = st.prefix.value();
      out.terms = next;
      return out;
    }
    const double cur = st.partial[next];
    out.doubling_gap = std::abs(cur - prev);
    out.value = cur;
    out.terms = next;
    if (out.doubling_gap <= rel_tol * cur) {
      out.converged = true;
      return out;
    }
    prev = cur;
    N = next;
  }
}

bool sandwich_check(double beta, std::size_t N) {
  if (N == 0) throw std::invalid_argument("sandwich_check: N must be >= 1");
  if (N > kMaxSandwichLength) {
    throw ResourceLimit("sandwich length cap is " +
                        std::to_string(kMaxSandwichLength));
  }
  const PartitionTable t = partition_sequence(beta, 2 * N);
  KahanSum wsum;
  {
    KahanSum s;
    for (std::size_t k = 1; k <= N; ++k) {
      s.add(1.0 / static_cast<double>(k));
      wsum.add(std::exp(-beta * s.value()));
    }
  }
  const double lhs = t.partial_M[N];
  const double mid = (1.0 + t.partial_M[N]) * wsum.value();
  const double rhs = t.partial_M[2 * N];
  const double slack =
      1e-12 * std::max({std::abs(lhs), std::abs(mid), std::abs(rhs)});
  return lhs <= mid + slack && mid <= rhs + slack;
}

double AtomicMeasure::cylinder_mass(const Word& u) const {
  KahanSum acc;
  if (u.all_ones() || u.empty()) acc.add(atom_at_x);
  for (const Atom& a : atoms) {
    if (in_cylinder(a.point, u)) acc.add(a.weight);
  }
  return acc.value();
}

AtomicMeasure atomic_measure(double beta, std::size_t level_cap) {
  if (level_cap == 0 || level_cap > kMaxAtomicLevel) {
    throw ResourceLimit("atomic measure level cap is " +
                        std::to_string(kMaxAtomicLevel));
  }
  // Existence gate: the series bracket must sit strictly below 1.
  if (beta <= 1.0) {
    throw NoAtomicMeasure(
        "no atomic measure: the classifier series diverges at beta <= 1");
  }
  const SeriesResult g = series_G(beta, 1e-10);
  if (!(g.upper() < 1.0)) {
    throw NoAtomicMeasure(
        "no atomic measure: certified series bracket does not lie below 1 "
        "(beta <= critical)");
  }

  const PartitionTable t = partition_sequence(beta, level_cap);
  AtomicMeasure m;
  m.beta = beta;
  m.level_cap = level_cap;
  m.normalizer = 1.0 + t.partial_M[level_cap];
  m.atom_at_x = 1.0 / m.normalizer;

  m.atoms.reserve(std::size_t{1} << level_cap);
  for (std::size_t n = 1; n <= level_cap; ++n) {
    for (TailPoint& y : enumerate_level_set(n)) {
      const double w = std::exp(-beta * birkhoff_sum(y, n)) / m.normalizer;
      m.atoms.push_back(Atom{std::move(y), w});
    }
  }

  const TotalMass tm = total_mass(beta, 1e-10);
  if (!tm.converged) {
    throw ResourceLimit(
        "atomic measure: total mass did not converge within the length cap "
        "(beta too close to critical for the doubling criterion)");
  }
  m.mass_estimate = tm.value;
  const double discarded = std::max(0.0, tm.value - t.partial_M[level_cap]);
  m.tail_bound =
      (discarded + 2.0 * tm.doubling_gap + 1e-15) / (1.0 + t.partial_M[level_cap]);
  return m;
}

std::string to_json(const AtomicMeasure& m) {
  nlohmann::json j;
  j["beta"] = m.beta;
  j["level_cap"] = m.level_cap;
  j["normalizer"] = m.normalizer;
  j["atom_at_x"] = m.atom_at_x;
  j["tail_bound"] = m.tail_bound;
  j["mass_estimate"] = m.mass_estimate;
  nlohmann::json atoms = nlohmann::json::object();
  for (const Atom& a : m.atoms) {
    atoms[a.point.stem().str()] = a.weight;
  }
  j["atoms"] = std::move(atoms);
  return j.dump(2);
}

}  // namespace kmslab
