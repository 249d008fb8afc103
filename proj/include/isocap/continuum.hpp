#pragma once

#include "isocap/lattice_function.hpp"

namespace isocap {

/// |B_1| in R^d.
double ball_volume(int d);
/// Same quantity through std::tgamma; used to cross-check the closed forms.
double ball_volume_gamma(int d);

/// Radius of the ball of volume alpha.
double r_alpha(double alpha, int d);

/// 1 for x <= 1, x^{(p-d)/(p-1)} beyond. Requires 1 < p < d.
double radial_potential_p(double x, double p, int d);
/// 1 for x <= 1, (x^{2-d} - R^{2-d}) / (1 - R^{2-d}) on (1, R], 0 beyond. Requires R > 1, d >= 3.
double radial_potential_relative(double x, double R, int d);

/// ((p-1)/(d-p))^{1-p} d |B_1|
double cap_p_ball(double p, int d);
/// |B_1| d (d-2) / (1 - R^{2-d})
double cap_relative_ball(double R, int d);
/// |B_1|^{(p-d)/d} cap_p(B_1): the volume-normalized ball value.
double scaled_ball_target(double p, int d);

/// Mean of |nu_1|^p over the unit sphere S^{d-1}.
double sphere_mean_abs_power(double p, int d);
/// d * sphere_mean_abs_power: ratio of sum_n |d_n u|^p to |grad u|^p averaged over directions.
/// Equals 1 for p = 2; nearest-neighbour energies of radial profiles carry this factor.
double lattice_anisotropy(double p, int d);

struct ContinuumBallData {
  int dim = 0;
  double p = 0.0;
  double cap_value = 0.0;
  double ball_volume = 0.0;
};
ContinuumBallData ball_data(double p, int d);

/// u_k(i) = radial_potential_p(|i| / k) for |i| <= cutoff, then a linear taper reaching 0 at 2 cutoff.
/// Requires cutoff >= k.
LatticeFunction discretized_test_function(double k, double p, int d, double cutoff);

/// Ordered-pair energy of the untruncated profile carried by edges beyond radius `cutoff`
/// (continuum estimate, includes the lattice anisotropy factor).
double test_function_tail(double k, double p, int d, double cutoff);

/// Smallest dyadic cutoff 2^m k whose tail estimate is below rel_tol times the ball target energy,
/// capped at 2^max_m k.
double dyadic_cutoff(double k, double p, int d, double rel_tol, int max_m);

struct TestFunctionEnergy {
  long n = 0;             // #(B_k cap Z^d), the set where u_k = 1
  double inner = 0.0;     // exact ordered energy of edges touching |i| <= cutoff
  double tail = 0.0;      // estimate for the remaining edges
  double total() const { return inner + tail; }
  /// N^{(p-d)/d} total / 2: comparable with scaled_ball_target.
  double scaled_edge(double p, int d) const;
};

/// Energy of the untruncated u_k, streamed over the lattice up to `cutoff` plus the analytic tail.
TestFunctionEnergy test_function_energy(double k, double p, int d, double cutoff);

}  // namespace isocap
