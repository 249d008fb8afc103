#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "isocap/lattice_function.hpp"

namespace isocap {

/// Simplex z, z + e_{pi(0)}, z + e_{pi(0)} + e_{pi(1)}, ... of the unit cube at z. Volume 1/d!.
struct KuhnSimplex {
  LatticePoint anchor;
  std::array<int, kMaxDim> perm{};

  std::vector<LatticePoint> vertices() const;
};

double factorial(int d);

/// The d! Kuhn simplices tiling z + [0,1]^d, permutations in lexicographic order.
std::vector<KuhnSimplex> kuhn_simplices_of_cube(const LatticePoint& z);

/// Union of Kuhn simplices whose vertices all lie in X.
struct EmbeddedSet {
  LatticeSet source;
  std::vector<KuhnSimplex> simplices;
  double volume = 0.0;
};

EmbeddedSet embed(const LatticeSet& x);

/// True when the point y (real coordinates) lies in the closure of an included simplex.
bool zeta_contains(const LatticeSet& x, const std::vector<double>& y);

/// (2 ceil(sqrt d) + 1)^d
double kappa_d(int d);

struct ZetaVolumeReport {
  long n = 0;
  double volume = 0.0;
  long perimeter = 0;
  double kappa = 0.0;
  bool upper_ok = false;  // volume <= N
  bool lower_ok = false;  // N - volume <= kappa P(X)
};

ZetaVolumeReport zeta_volume_bounds_check(const LatticeSet& x);

struct SymDiffOptions {
  int max_depth = 12;
  double rel_tol = 1e-3;  // stop refining a piece once its volume is below rel_tol * max(1, |zeta|) / #pieces
};

struct SymDiffEstimate {
  double value = 0.0;
  double lower = 0.0;  // certified interval
  double upper = 0.0;
};

/// |zeta(X) delta (z + B_r)| by longest-edge bisection of the simplices that straddle the sphere.
SymDiffEstimate zeta_ball_sym_diff(const LatticeSet& x, double r, const std::vector<double>& z,
                                   const SymDiffOptions& opts = {});

enum class GradientNorm { L2, Lp };

struct InterpolationEnergy {
  double integral = 0.0;    // sum over simplices of |grad u|^p / d!
  double reconciled = 0.0;  // 2 x integral: ordered-pair convention of energy_p
};

/// Energy of the piecewise-affine interpolation on the Kuhn triangulation.
InterpolationEnergy interpolation_energy(const LatticeFunction& u, double p, GradientNorm norm = GradientNorm::Lp);

}  // namespace isocap
