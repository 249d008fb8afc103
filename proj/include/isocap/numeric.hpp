#pragma once

#include <cmath>
#include <vector>

namespace isocap {

/// Compensated (Neumaier) accumulator.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  NeumaierSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// |x|^p with the p = 2 case kept exact.
inline double pow_abs(double x, double p) {
  x = std::abs(x);
  if (p == 2.0) return x * x;
  if (x == 0.0) return 0.0;
  return std::pow(x, p);
}

/// sign(x) |x|^{p-1}
inline double signed_pow(double x, double p) {
  if (p == 2.0) return x;
  if (x == 0.0) return 0.0;
  const double m = std::pow(std::abs(x), p - 1.0);
  return x > 0 ? m : -m;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs at least two distinct x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

/// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace isocap
