#pragma once

#include <cstddef>

namespace kmslab {

/// Harmonic number s_k = 1 + 1/2 + ... + 1/k, compensated and memoized so
/// repeated queries are O(1). Rejects k = 0.
double harmonic(std::size_t k);

/// Certified enclosure of the classifier series G(beta) = sum_k exp(-beta*s_k).
/// The true value lies in [value + tail_low, value + tail_high]; summation
/// rounding is already folded into the bracket.
struct SeriesResult {
  double value = 0.0;
  double tail_low = 0.0;
  double tail_high = 0.0;
  std::size_t terms_used = 0;

  double lower() const { return value + tail_low; }
  double upper() const { return value + tail_high; }
  double width() const { return tail_high - tail_low; }
};

inline constexpr std::size_t kSeriesTermCap = 100'000'000;

/// Sums G(beta) until the certified bracket width is <= tol.
/// Throws DivergentSeries for beta <= 1 (termwise the series dominates a
/// multiple of the harmonic series there) and ResourceLimit at the term cap.
SeriesResult series_G(double beta, double tol);

/// Certified bisection enclosure of the critical inverse temperature, the
/// unique root of G(beta) = 1 in (1, 2].
struct CriticalBeta {
  double lo = 0.0;
  double hi = 0.0;
  double midpoint = 0.0;
  double residual = 0.0;  // certified upper bound on |G(midpoint) - 1|

  // Endpoint brackets backing the sign certification: g_at_lo.lower() > 1
  // and g_at_hi.upper() < 1.
  SeriesResult g_at_lo;
  SeriesResult g_at_hi;
};

/// Bisection with certified sign decisions; returns an interval of width
/// <= tol whose endpoints carry rigorous G brackets on either side of 1.
/// Requires tol >= 1e-12.
CriticalBeta solve_beta0(double tol);

}  // namespace kmslab
