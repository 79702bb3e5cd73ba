#include "kmslab/critical_temperature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmslab/errors.hpp"
#include "kmslab/numeric.hpp"

namespace kmslab {

namespace {

std::mutex g_harmonic_mutex;
std::vector<double> g_harmonic{0.0};  // g_harmonic[k] = s_k
KahanSum g_harmonic_acc;

constexpr double kEps = 2.220446049250313e-16;

// Certified enclosure of the tail sum_{k>K} exp(-beta*s_k), valid for
// beta > 1 and K >= 16.
//
// Increment sandwich, anchored at K through the midpoint logarithm
// (1/j = 2*atanh(1/(2j)) - correction, correction in (0, 1.01/(12 j^3)]):
//   ln((2k+1)/(2K+1)) - 1/(20 K^2)  <=  s_k - s_K  <=  ln((2k+1)/(2K+1)).
// The reduced sum S = sum_{k>K} (2k+1)^(-beta) has a convex decreasing
// integrand, so the midpoint rule bounds it above and the trapezoid rule
// below:
//   (2K+3)^(1-b)/(2(b-1)) + (2K+3)^(-b)/2  <=  S  <=  (2K+2)^(1-b)/(2(b-1)).
// Everything is evaluated in log space to stay finite for large beta.
struct TailBounds {
  double low = 0.0;
  double high = 0.0;
};

TailBounds tail_bounds(double beta, std::size_t K, double s_K) {
  const double b = beta;
  const double k2 = 2.0 * static_cast<double>(K);
  const double l1 = std::log(k2 + 1.0);
  const double l2 = std::log(k2 + 2.0);
  const double l3 = std::log(k2 + 3.0);
  const double slack = 1e-12;  // covers log/exp/mult rounding in the formulas

  TailBounds t;
  t.low = std::exp(b * (l1 - l3 - s_K)) *
          ((k2 + 3.0) / (2.0 * (b - 1.0)) + 0.5) * (1.0 - slack);
  t.high = std::exp(b * (l1 - l2 - s_K) +
                    b / (20.0 * static_cast<double>(K) * static_cast<double>(K))) *
           ((k2 + 2.0) / (2.0 * (b - 1.0))) * (1.0 + slack);
  if (t.low < 0.0) t.low = 0.0;
  return t;
}

SeriesResult make_result(double value_hat, double beta, double s_K,
                         std::size_t K, const TailBounds& t) {
  // Fold the summation error into the bracket: Neumaier keeps the partial-sum
  // error at eps*sum, exp contributes one ulp per term, and the compensated
  // harmonic prefix propagates as beta*eps*s_K per term.
  const double slack = kEps * value_hat * (4.0 + 2.0 * beta * s_K);
  SeriesResult r;
  r.value = value_hat - slack;
  r.tail_low = t.low;
  r.tail_high = t.high + 2.0 * slack;
  r.terms_used = K;
  return r;
}

enum class Side { Above, Below, Straddle };

struct SignOutcome {
  Side side = Side::Straddle;
  SeriesResult enclosure;
};

// Sums the series with bracket checks at checkpoints. In sign mode the loop
// stops as soon as the bracket separates from 1; otherwise it runs until the
// bracket width reaches tol.
SignOutcome accumulate(double beta, double tol, bool sign_mode) {
  KahanSum s_acc;
  KahanSum v_acc;
  double s = 0.0;
  for (std::size_t k = 1; k <= kSeriesTermCap; ++k) {
    s_acc.add(1.0 / static_cast<double>(k));
    s = s_acc.value();
    v_acc.add(std::exp(-beta * s));

    const bool checkpoint =
        k >= 16 && ((k & (k - 1)) == 0 || (k & 8191) == 0);
    if (!checkpoint) continue;

    const TailBounds t = tail_bounds(beta, k, s);
    const SeriesResult r = make_result(v_acc.value(), beta, s, k, t);
    if (sign_mode) {
      if (r.lower() > 1.0) return {Side::Above, r};
      if (r.upper() < 1.0) return {Side::Below, r};
    }
    if (r.width() <= tol) {
      return {r.lower() > 1.0   ? Side::Above
              : r.upper() < 1.0 ? Side::Below
                                : Side::Straddle,
              r};
    }
  }
  throw ResourceLimit("series_G: term cap " + std::to_string(kSeriesTermCap) +
                      " reached before certification (beta=" +
                      std::to_string(beta) + ")");
}

// Rigorous two-term lower bound on G(b1) - G(b2) for 1 < b1 < b2: every term
// of G decreases in beta, so the difference dominates the first two term gaps.
double drop_lower_bound(double b1, double b2) {
  return (std::exp(-b1) - std::exp(-b2)) +
         (std::exp(-1.5 * b1) - std::exp(-1.5 * b2));
}

}  // namespace

double harmonic(std::size_t k) {
  if (k == 0) throw std::invalid_argument("harmonic: k must be >= 1");
  std::lock_guard<std::mutex> lock(g_harmonic_mutex);
  while (g_harmonic.size() <= k) {
    g_harmonic_acc.add(1.0 / static_cast<double>(g_harmonic.size()));
    g_harmonic.push_back(g_harmonic_acc.value());
  }
  return g_harmonic[k];
}

SeriesResult series_G(double beta, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("series_G: tol must be > 0");
  if (!(beta > 1.0)) {
    throw DivergentSeries(
        "series_G diverges for beta <= 1: exp(-beta*s_k) >= exp(-beta)/k");
  }
  return accumulate(beta, tol, /*sign_mode=*/false).enclosure;
}

CriticalBeta solve_beta0(double tol) {
  if (!(tol >= 1e-12)) {
    throw std::invalid_argument("solve_beta0: tol must be >= 1e-12");
  }
  const double floor_tol = std::clamp(tol / 2000.0, 2e-14, 1e-9);
  const double beta_min = 1.0 + 1e-6;

  const auto sign_at = [&](double beta, double g_tol) {
    return accumulate(beta, g_tol, /*sign_mode=*/true);
  };

  double lo = beta_min;
  double hi = 2.0;

  if (sign_at(lo, 1e-6).side != Side::Above) {
    throw InternalError("solve_beta0: lower bracket end failed certification");
  }
  while (sign_at(hi, 1e-6).side != Side::Below) {
    hi *= 2.0;  // certified expansion; never taken when G(2) < 1 holds
    if (hi > 64.0) {
      throw InternalError("solve_beta0: no certified upper bracket end");
    }
  }
  const double hi_cap = hi;

  // Bisect to a quarter of the requested width. A probe whose bracket
  // straddles 1 is too close to the root to classify, so rotate to nearby
  // interior points; if all three straddle, contract around the midpoint
  // straddle using the term-wise derivative bound.
  const double target = tol / 4.0;
  while (hi - lo > target) {
    const double width = hi - lo;
    const double g_tol = std::max(floor_tol, width * 0.01);
    bool decided = false;
    SignOutcome mid_straddle;
    double mid_point = 0.0;
    for (const double frac : {0.5, 0.375, 0.625}) {
      const double m = lo + frac * width;
      const SignOutcome s = sign_at(m, g_tol);
      if (s.side == Side::Above) {
        lo = m;
        decided = true;
        break;
      }
      if (s.side == Side::Below) {
        hi = m;
        decided = true;
        break;
      }
      if (frac == 0.5) {
        mid_straddle = s;
        mid_point = m;
      }
    }
    if (decided) continue;

    // All probes straddle: |G - 1| <= bracket width at each. Enclose the root
    // from the midpoint bracket. For d > 0, G(m+d) <= upper - drop(m, m+d)
    // and G(m-d) >= lower + drop(m-d, m), so stepping d_plus/d_minus out
    // certifies the signs there.
    const double up = mid_straddle.enclosure.upper();
    const double lowv = mid_straddle.enclosure.lower();
    double d_plus = std::max(up - 1.0, 0.0) * std::exp(mid_point) + 4.0 * floor_tol;
    double d_minus = std::max(1.0 - lowv, 0.0) * std::exp(mid_point) + 4.0 * floor_tol;
    while (drop_lower_bound(mid_point, mid_point + d_plus) <= up - 1.0) d_plus *= 2.0;
    while (drop_lower_bound(mid_point - d_minus, mid_point) <= 1.0 - lowv) d_minus *= 2.0;
    const double new_lo = std::max(lo, mid_point - d_minus);
    const double new_hi = std::min(hi, mid_point + d_plus);
    if (!(new_hi - new_lo < width)) {
      throw InternalError("solve_beta0: stalled bisection");
    }
    lo = new_lo;
    hi = new_hi;
    if (hi - lo <= target) break;
  }

  // Expand symmetrically so both endpoints sit a definite distance from the
  // root, then certify them directly. One rescue shift per side keeps the
  // total width within tol.
  const double pad = tol / 4.0;
  double lo_f = std::max(lo - pad, beta_min);
  double hi_f = std::min(hi + pad, hi_cap);

  const double cert_tol = std::max(floor_tol, tol / 50.0);
  SignOutcome at_lo = sign_at(lo_f, cert_tol);
  if (at_lo.side != Side::Above) {
    lo_f = std::max(lo_f - tol / 8.0, beta_min);
    at_lo = sign_at(lo_f, cert_tol);
  }
  SignOutcome at_hi = sign_at(hi_f, cert_tol);
  if (at_hi.side != Side::Below) {
    hi_f = std::min(hi_f + tol / 8.0, hi_cap);
    at_hi = sign_at(hi_f, cert_tol);
  }
  if (at_lo.side != Side::Above || at_hi.side != Side::Below) {
    throw InternalError("solve_beta0: endpoint certification failed");
  }

  CriticalBeta out;
  out.lo = lo_f;
  out.hi = hi_f;
  out.midpoint = 0.5 * (lo_f + hi_f);
  out.g_at_lo = at_lo.enclosure;
  out.g_at_hi = at_hi.enclosure;
  const SeriesResult mid = series_G(out.midpoint, std::max(floor_tol, tol / 10.0));
  out.residual = std::max(std::abs(mid.lower() - 1.0), std::abs(mid.upper() - 1.0));
  require_finite(out.residual, "solve_beta0 residual");
  return out;
}

}  // namespace kmslab
