#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace kmslab {

/// Neumaier-compensated accumulator. The rounding error of the running sum is
/// bounded by eps * sum(|x_i|) independently of the number of terms.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::range_error(std::string("non-finite value in ") + what);
  }
  return x;
}

}  // namespace kmslab
