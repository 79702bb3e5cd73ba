#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kmslab/shift_space.hpp"

namespace kmslab {

inline constexpr std::size_t kMaxPartitionLength = 100'000;
inline constexpr std::size_t kMaxSandwichLength = 50'000;
inline constexpr std::size_t kMaxBruteforceLevel = 20;
inline constexpr std::size_t kMaxAtomicLevel = 20;

/// Renewal sequence Z_0..Z_N with prefix sums. Z_0 = 1 and
/// Z_n = sum_{k=1..n} exp(-beta*s_k) Z_{n-k}.
struct PartitionTable {
  double beta = 0.0;
  std::vector<double> Z;          // size N+1, Z[0] = 1
  std::vector<double> partial_M;  // partial_M[n] = Z_1 + ... + Z_n, size N+1
};

PartitionTable partition_sequence(double beta, std::size_t N);

/// Independent oracle: sums exp(-beta * Birkhoff) over the full level set.
/// Exponential in n; capped at kMaxBruteforceLevel.
double partition_bruteforce(double beta, std::size_t n);

struct TotalMass {
  double value = 0.0;         // prefix sum at the final length
  bool converged = false;     // doubling gap met rel_tol before any cap
  double doubling_gap = 0.0;  // |M(2N) - M(N)| at the final doubling
  std::size_t terms = 0;      // final length
};

/// Doubling estimate of M = sum_n Z_n. Divergence (beta <= beta0) is a
/// flagged outcome, not an error: the sum is declared not-converged when it
/// passes 1e9 or the length cap.
TotalMass total_mass(double beta, double rel_tol,
                     std::size_t cap = kMaxPartitionLength);

/// Verifies sum_{1..N} Z_n <= (sum_{0..N} Z_n)(sum_{1..N} e^{-beta s_k})
///                        <= sum_{1..2N} Z_n
/// with additive slack 1e-12 * (largest operand).
bool sandwich_check(double beta, std::size_t N);

struct Atom {
  TailPoint point;
  double weight = 0.0;  // normalized
};

/// Truncated atomic measure at the fixed point. Atoms carry
/// exp(-beta*Birkhoff)/normalizer for every level <= level_cap with
/// normalizer = 1 + partial_M(level_cap), so the retained mass is exactly 1.
/// tail_bound is a certified bound on how far any cylinder mass can sit from
/// its untruncated value; it is reported for use as a comparison tolerance.
struct AtomicMeasure {
  double beta = 0.0;
  std::size_t level_cap = 0;
  std::vector<Atom> atoms;  // levels 1..level_cap, level-major, lexicographic
  double atom_at_x = 0.0;
  double normalizer = 0.0;
  double tail_bound = 0.0;
  double mass_estimate = 0.0;  // converged estimate of the full M

  /// Sum of atom weights inside [u]; includes the fixed-point atom when u is
  /// empty or all ones.
  double cylinder_mass(const Word& u) const;
};

/// Requires beta above the critical value (certified through the series
/// bracket); throws NoAtomicMeasure otherwise.
AtomicMeasure atomic_measure(double beta, std::size_t level_cap);

std::string to_json(const AtomicMeasure& m);

}  // namespace kmslab
