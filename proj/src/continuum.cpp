#include "isocap/continuum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "isocap/numeric.hpp"

namespace isocap {

namespace {

void check_p_range(double p, int d) {
  if (!(p > 1.0 && p < d)) throw std::invalid_argument("exponent p must satisfy 1 < p < d");
}

}  // namespace

double ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("ball_volume: d must be >= 1");
  constexpr double pi = std::numbers::pi;
  const int m = d / 2;
  if (d % 2 == 0) {
    double v = 1.0;
    for (int k = 1; k <= m; ++k) v *= pi / k;  // pi^m / m!
    return v;
  }
  // 2^{m+1} pi^m / (2m+1)!!
  double v = 2.0;
  for (int k = 1; k <= m; ++k) v *= 2.0 * pi / (2 * k + 1);
  return v;
}

double ball_volume_gamma(int d) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double r_alpha(double alpha, int d) {
  if (alpha < 0) throw std::invalid_argument("r_alpha: negative volume");
  return std::pow(alpha / ball_volume(d), 1.0 / d);
}

double radial_potential_p(double x, double p, int d) {
  check_p_range(p, d);
  if (x < 0) throw std::invalid_argument("radial_potential_p: negative radius");
  if (x <= 1.0) return 1.0;
  return std::pow(x, (p - d) / (p - 1.0));
}

double radial_potential_relative(double x, double R, int d) {
  if (!(R > 1.0) || d < 3) throw std::invalid_argument("radial_potential_relative needs R > 1 and d >= 3");
  if (x < 0) throw std::invalid_argument("radial_potential_relative: negative radius");
  if (x <= 1.0) return 1.0;
  if (x >= R) return 0.0;
  const double rr = std::pow(R, 2.0 - d);
  return (std::pow(x, 2.0 - d) - rr) / (1.0 - rr);
}

double cap_p_ball(double p, int d) {
  check_p_range(p, d);
  return std::pow((p - 1.0) / (d - p), 1.0 - p) * d * ball_volume(d);
}

double cap_relative_ball(double R, int d) {
  if (!(R > 1.0) || d < 3) throw std::invalid_argument("cap_relative_ball needs R > 1 and d >= 3");
  return ball_volume(d) * d * (d - 2) / (1.0 - std::pow(R, 2.0 - d));
}

double scaled_ball_target(double p, int d) { return std::pow(ball_volume(d), (p - d) / d) * cap_p_ball(p, d); }

double sphere_mean_abs_power(double p, int d) {
  if (!(p > 0) || d < 1) throw std::invalid_argument("sphere_mean_abs_power: bad arguments");
  if (d == 1) return 1.0;
  return std::tgamma(d / 2.0) * std::tgamma((p + 1.0) / 2.0) /
         (std::sqrt(std::numbers::pi) * std::tgamma((d + p) / 2.0));
}

double lattice_anisotropy(double p, int d) { return d * sphere_mean_abs_power(p, d); }

ContinuumBallData ball_data(double p, int d) { return ContinuumBallData{d, p, cap_p_ball(p, d), ball_volume(d)}; }

LatticeFunction discretized_test_function(double k, double p, int d, double cutoff) {
  check_p_range(p, d);
  if (!(k > 0) || cutoff < k) throw std::invalid_argument("discretized_test_function needs 0 < k <= cutoff");
  const int m = static_cast<int>(std::ceil(2.0 * cutoff));
  LatticePoint lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = -m;
    hi[a] = m;
  }
  LatticeFunction u(Box(lo, hi));
  const double edge = radial_potential_p(cutoff / k, p, d);
  for (std::size_t idx = 0; idx < u.values().size(); ++idx) {
    const double r = u.box().point(idx).norm();
    double v = 0.0;
    if (r <= cutoff)
      v = radial_potential_p(r / k, p, d);
    else if (r < 2.0 * cutoff)
      v = edge * (2.0 - r / cutoff);
    u.values()[idx] = v;
  }
  return u.trimmed();
}

double test_function_tail(double k, double p, int d, double cutoff) {
  check_p_range(p, d);
  const double a = (p - d) / (p - 1.0);
  return 2.0 * lattice_anisotropy(p, d) * d * ball_volume(d) * std::pow(std::abs(a), p - 1.0) *
         std::pow(k, -a * p) * std::pow(cutoff, a);
}

double dyadic_cutoff(double k, double p, int d, double rel_tol, int max_m) {
  // ordered energy of the ideal profile ~ 2 cap_p(B_1) k^{d-p}
  const double main = 2.0 * cap_p_ball(p, d) * std::pow(k, d - p);
  double c = k;
  for (int m = 0; m < max_m; ++m, c *= 2.0)
    if (test_function_tail(k, p, d, c) <= rel_tol * main) return c;
  return c;
}

double TestFunctionEnergy::scaled_edge(double p, int d) const {
  return std::pow(static_cast<double>(n), (p - d) / d) * total() / 2.0;
}

TestFunctionEnergy test_function_energy(double k, double p, int d, double cutoff) {
  check_p_range(p, d);
  if (!(k > 0) || cutoff < k) throw std::invalid_argument("test_function_energy needs 0 < k <= cutoff");
  const int m = static_cast<int>(std::ceil(cutoff)) + 1;
  const double c2 = cutoff * cutoff;
  const double k2 = k * k * (1 + 1e-14);
  LatticePoint lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = -m;
    hi[a] = m;
  }
  const Box box(lo, hi);
  auto profile = [&](long n2) { return radial_potential_p(std::sqrt(static_cast<double>(n2)) / k, p, d); };
  TestFunctionEnergy out;
  NeumaierSum inner;
  for (std::size_t idx = 0; idx < box.volume(); ++idx) {
    const LatticePoint i = box.point(idx);
    const long n2 = i.norm2();
    if (static_cast<double>(n2) > c2) continue;
    if (static_cast<double>(n2) <= k2) ++out.n;
    const double ui = profile(n2);
    for (int a = 0; a < d; ++a)
      for (int s : {-1, +1}) {
        const long nb2 = n2 + 2L * s * i[a] + 1;
        const bool nb_inside = static_cast<double>(nb2) <= c2;
        if (nb_inside && s < 0) continue;  // counted from the other endpoint
        inner.add(pow_abs(ui - profile(nb2), p));
      }
  }
  out.inner = 2.0 * inner.value();
  out.tail = test_function_tail(k, p, d, cutoff);
  return out;
}

}  // namespace isocap
