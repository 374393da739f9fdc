#pragma once

#include <cmath>
#include <limits>

namespace entropylab {

/// An information value in natural-log units with an absolute error bound.
struct Nats {
  double value = 0.0;
  double err = 0.0;

  friend Nats operator+(Nats a, Nats b) { return {a.value + b.value, a.err + b.err}; }
  friend Nats operator-(Nats a, Nats b) { return {a.value - b.value, a.err + b.err}; }
  friend Nats operator*(double s, Nats a) { return {s * a.value, std::abs(s) * a.err}; }
};

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
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
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Error bound for a compensated sum of `terms` values each carrying a
/// rounding error of a few ulps of `scale`.
inline double summation_error(std::size_t terms, double scale) {
  return 4.0 * kEps * (static_cast<double>(terms) + 1.0) * (std::abs(scale) + 1e-300);
}

}  // namespace entropylab
