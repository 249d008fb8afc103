#include "isocap/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "isocap/continuum.hpp"
#include "isocap/numeric.hpp"

namespace isocap {

double factorial(int d) {
  double f = 1;
  for (int k = 2; k <= d; ++k) f *= k;
  return f;
}

std::vector<LatticePoint> KuhnSimplex::vertices() const {
  std::vector<LatticePoint> v{anchor};
  LatticePoint cur = anchor;
  for (int m = 0; m < anchor.dim(); ++m) {
    cur = cur.shifted(perm[m], 1);
    v.push_back(cur);
  }
  return v;
}

namespace {

std::vector<std::array<int, kMaxDim>> all_permutations(int d) {
  std::array<int, kMaxDim> perm{};
  std::iota(perm.begin(), perm.begin() + d, 0);
  std::vector<std::array<int, kMaxDim>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.begin() + d));
  return out;
}

bool chain_in(const LatticeSet& x, const LatticePoint& z, const std::array<int, kMaxDim>& perm) {
  LatticePoint cur = z;
  if (!x.contains(cur)) return false;
  for (int m = 0; m < z.dim(); ++m) {
    cur[perm[m]] += 1;
    if (!x.contains(cur)) return false;
  }
  return true;
}

}  // namespace

std::vector<KuhnSimplex> kuhn_simplices_of_cube(const LatticePoint& z) {
  std::vector<KuhnSimplex> out;
  for (const auto& perm : all_permutations(z.dim())) out.push_back(KuhnSimplex{z, perm});
  return out;
}

EmbeddedSet embed(const LatticeSet& x) {
  EmbeddedSet e;
  e.source = x;
  if (x.empty()) return e;
  const int d = x.dim();
  const auto perms = all_permutations(d);
  LatticePoint ones(d);
  for (int a = 0; a < d; ++a) ones[a] = 1;
  for (const auto& z : x) {
    if (!x.contains(z + ones)) continue;
    for (const auto& perm : perms)
      if (chain_in(x, z, perm)) e.simplices.push_back(KuhnSimplex{z, perm});
  }
  e.volume = static_cast<double>(e.simplices.size()) / factorial(d);
  return e;
}

bool zeta_contains(const LatticeSet& x, const std::vector<double>& y) {
  const int d = x.dim();
  if (static_cast<int>(y.size()) != d) throw std::invalid_argument("zeta_contains: dimension mismatch");
  LatticePoint z(d);
  std::array<double, kMaxDim> frac{};
  for (int a = 0; a < d; ++a) {
    const double f = std::floor(y[a]);
    z[a] = static_cast<int>(f);
    frac[a] = y[a] - f;
  }
  // the simplex holding y orders its axes by decreasing fractional part
  std::array<int, kMaxDim> perm{};
  std::iota(perm.begin(), perm.begin() + d, 0);
  std::stable_sort(perm.begin(), perm.begin() + d, [&](int a, int b) { return frac[a] > frac[b]; });
  return chain_in(x, z, perm);
}

double kappa_d(int d) { return std::pow(2.0 * std::ceil(std::sqrt(static_cast<double>(d))) + 1.0, d); }

ZetaVolumeReport zeta_volume_bounds_check(const LatticeSet& x) {
  ZetaVolumeReport r;
  r.n = static_cast<long>(x.size());
  r.volume = embed(x).volume;
  r.perimeter = perimeter(x);
  r.kappa = kappa_d(x.dim());
  r.upper_ok = r.volume <= static_cast<double>(r.n);
  r.lower_ok = static_cast<double>(r.n) - r.volume <= r.kappa * static_cast<double>(r.perimeter);
  return r;
}

namespace {

struct Simplex {
  std::vector<std::array<double, kMaxDim>> v;  // d + 1 vertices
  double vol;
};

struct BallClip {
  int d;
  std::array<double, kMaxDim> c{};
  double r2;
  double r;
  int max_depth;
  double leaf_vol;
  double inside = 0;     // certified inside volume
  double straddle = 0;   // unresolved volume
  double estimate = 0;   // inside estimate of unresolved pieces

  double dist2(const std::array<double, kMaxDim>& a) const {
    double s = 0;
    for (int k = 0; k < d; ++k) s += (a[k] - c[k]) * (a[k] - c[k]);
    return s;
  }

  void clip(const Simplex& s, int depth) {
    int in = 0;
    for (const auto& v : s.v) in += dist2(v) <= r2;
    if (in == d + 1) {
      inside += s.vol;
      return;
    }
    std::array<double, kMaxDim> cen{};
    for (const auto& v : s.v)
      for (int k = 0; k < d; ++k) cen[k] += v[k] / (d + 1);
    double rad2 = 0;
    for (const auto& v : s.v) {
      double t = 0;
      for (int k = 0; k < d; ++k) t += (v[k] - cen[k]) * (v[k] - cen[k]);
      rad2 = std::max(rad2, t);
    }
    const double dc = std::sqrt(dist2(cen));
    if (dc >= r + std::sqrt(rad2)) return;  // bounding sphere misses the ball
    if (depth >= max_depth || s.vol <= leaf_vol) {
      straddle += s.vol;
      const int samples = in + (dist2(cen) <= r2);
      estimate += s.vol * samples / (d + 2);
      return;
    }
    // longest-edge bisection
    int ea = 0, eb = 1;
    double best = -1;
    for (int a = 0; a <= d; ++a)
      for (int b = a + 1; b <= d; ++b) {
        double t = 0;
        for (int k = 0; k < d; ++k) t += (s.v[a][k] - s.v[b][k]) * (s.v[a][k] - s.v[b][k]);
        if (t > best) {
          best = t;
          ea = a;
          eb = b;
        }
      }
    std::array<double, kMaxDim> mid{};
    for (int k = 0; k < d; ++k) mid[k] = 0.5 * (s.v[ea][k] + s.v[eb][k]);
    Simplex left = s, right = s;
    left.v[ea] = mid;
    right.v[eb] = mid;
    left.vol = right.vol = 0.5 * s.vol;
    clip(left, depth + 1);
    clip(right, depth + 1);
  }
};

}  // namespace

SymDiffEstimate zeta_ball_sym_diff(const LatticeSet& x, double r, const std::vector<double>& z,
                                   const SymDiffOptions& opts) {
  if (!(r > 0)) throw std::invalid_argument("zeta_ball_sym_diff needs r > 0");
  const int d = x.dim();
  if (static_cast<int>(z.size()) != d) throw std::invalid_argument("zeta_ball_sym_diff: center dimension mismatch");
  const EmbeddedSet e = embed(x);
  const double ball = ball_volume(d) * std::pow(r, d);
  BallClip clip;
  clip.d = d;
  for (int k = 0; k < d; ++k) clip.c[k] = z[k];
  clip.r = r;
  clip.r2 = r * r;
  clip.max_depth = opts.max_depth;
  const double vol_scale = std::max(1.0, e.volume);
  clip.leaf_vol = opts.rel_tol * vol_scale / std::max<std::size_t>(1, e.simplices.size());
  const double simplex_vol = 1.0 / factorial(d);
  for (const auto& s : e.simplices) {
    Simplex sx;
    sx.vol = simplex_vol;
    for (const auto& v : s.vertices()) {
      std::array<double, kMaxDim> a{};
      for (int k = 0; k < d; ++k) a[k] = v[k];
      sx.v.push_back(a);
    }
    clip.clip(sx, 0);
  }
  // |A delta B| = |A| + |B| - 2 |A cap B|
  SymDiffEstimate out;
  const double cap_est = clip.inside + clip.estimate;
  out.value = e.volume + ball - 2.0 * cap_est;
  out.lower = e.volume + ball - 2.0 * (clip.inside + clip.straddle);
  out.upper = e.volume + ball - 2.0 * clip.inside;
  return out;
}

InterpolationEnergy interpolation_energy(const LatticeFunction& u, double p, GradientNorm norm) {
  if (!(p > 1.0)) throw std::invalid_argument("interpolation_energy needs p > 1");
  InterpolationEnergy out;
  const Box& box = u.box();
  if (box.volume() == 0) return out;
  const int d = u.dim();
  const auto perms = all_permutations(d);
  // cubes z + [0,1]^d meeting the storage box
  LatticePoint lo = box.lo, hi = box.hi();
  for (int a = 0; a < d; ++a) lo[a] -= 1;
  const Box cubes(lo, hi);
  NeumaierSum sum;
  for (std::size_t k = 0; k < cubes.volume(); ++k) {
    const LatticePoint z = cubes.point(k);
    for (const auto& perm : perms) {
      LatticePoint cur = z;
      double prev = u(cur);
      double acc = 0;
      for (int m = 0; m < d; ++m) {
        cur[perm[m]] += 1;
        const double next = u(cur);
        const double g = next - prev;
        acc += norm == GradientNorm::Lp ? pow_abs(g, p) : g * g;
        prev = next;
      }
      if (norm == GradientNorm::L2) acc = p == 2.0 ? acc : std::pow(acc, 0.5 * p);
      sum.add(acc);
    }
  }
  out.integral = sum.value() / factorial(d);
  out.reconciled = 2.0 * out.integral;
  return out;
}

}  // namespace isocap
