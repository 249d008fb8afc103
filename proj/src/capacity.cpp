#include "isocap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "isocap/continuum.hpp"
#include "isocap/energy.hpp"
#include "isocap/numeric.hpp"

namespace isocap {

bool Domain::in_ball(const LatticePoint& i) const {
  return static_cast<double>((i - center).norm2()) < radius * radius;
}

bool Domain::interior(const LatticePoint& i) const {
  if (!in_ball(i)) return false;
  for (const auto& j : neighbors(i))
    if (!in_ball(j)) return false;
  return true;
}

Domain relative_domain(const LatticeSet& x, double R) {
  if (!(R > 0)) throw std::invalid_argument("relative capacity needs R > 0");
  return Domain{LatticePoint(x.dim()), R * std::pow(static_cast<double>(x.size()), 1.0 / x.dim())};
}

namespace {

enum : signed char { kZero = 0, kFree = 1, kOne = 2 };

// Dense working grid over the bounding box of a truncation ball (plus a margin of one).
struct Grid {
  int d = 0;
  Box box;
  std::vector<signed char> kind;
  std::vector<std::size_t> free;  // flat indices, increasing
  std::array<std::ptrdiff_t, 2 * kMaxDim> off{};
  int deg = 0;
};

Grid build_grid(const LatticeSet& x, const Domain& dom) {
  const int d = x.dim();
  if (dom.center.dim() != d) throw std::invalid_argument("domain center has the wrong dimension");
  if (!(dom.radius > 0)) throw std::invalid_argument("domain radius must be positive");
  Grid g;
  g.d = d;
  g.deg = 2 * d;
  const int m = static_cast<int>(std::ceil(dom.radius)) + 1;
  LatticePoint lo = dom.center, hi = dom.center;
  for (int a = 0; a < d; ++a) {
    lo[a] -= m;
    hi[a] += m;
  }
  g.box = Box(lo, hi);
  const std::size_t vol = g.box.volume();
  std::vector<char> ball(vol, 0);
  for (std::size_t k = 0; k < vol; ++k) ball[k] = dom.in_ball(g.box.point(k)) ? 1 : 0;
  std::ptrdiff_t stride = 1;
  for (int a = 0; a < d; ++a) {
    g.off[2 * a] = -stride;
    g.off[2 * a + 1] = stride;
    stride *= g.box.extent[a];
  }
  g.kind.assign(vol, kZero);
  for (std::size_t k = 0; k < vol; ++k) {
    if (!ball[k]) continue;
    bool inner = true;
    const LatticePoint p = g.box.point(k);
    for (int a = 0; a < d && inner; ++a)
      if (p[a] == g.box.lo[a] || p[a] == g.box.lo[a] + g.box.extent[a] - 1) inner = false;
    for (int e = 0; e < g.deg && inner; ++e)
      if (!ball[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + g.off[e])]) inner = false;
    if (inner) g.kind[k] = kFree;
  }
  for (const auto& pt : x) {
    if (!g.box.contains(pt) || g.kind[g.box.index(pt)] != kFree)
      throw ConstraintViolation("point " + pt.str() + " is not in the interior of the ball of radius " +
                                std::to_string(dom.radius) + " about " + dom.center.str());
    g.kind[g.box.index(pt)] = kOne;
  }
  for (std::size_t k = 0; k < vol; ++k)
    if (g.kind[k] == kFree) g.free.push_back(k);
  return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const std::vector<double>& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Preconditioned CG for a symmetric positive definite operator on the free nodes.
// apply(x_dense, out_compact); diag(k) gives the Jacobi weight.
template <class Apply, class Diag>
long pcg(const Grid& g, Apply&& apply, Diag&& diag, const std::vector<double>& b, std::vector<double>& x,
         double rel_tol, double abs_inf_tol, long max_it) {
  const std::size_t n = g.free.size();
  std::vector<double> dense(g.box.volume(), 0.0), ax(n), r(n), z(n), pv(n), ap(n);
  auto scatter = [&](const std::vector<double>& v) {
    for (std::size_t k = 0; k < n; ++k) dense[g.free[k]] = v[k];
  };
  scatter(x);
  apply(dense, ax);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ax[k];
  const double bnorm = std::sqrt(dot(b, b));
  auto done = [&] {
    return std::sqrt(dot(r, r)) <= rel_tol * std::max(bnorm, 1e-300) && max_abs(r) <= abs_inf_tol;
  };
  if (n == 0 || bnorm == 0.0 || done()) {
    if (bnorm == 0.0) std::fill(x.begin(), x.end(), 0.0);
    return 0;
  }
  for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag(k);
  pv = z;
  double rz = dot(r, z);
  long it = 0;
  while (it < max_it) {
    ++it;
    scatter(pv);
    apply(dense, ap);
    const double pap = dot(pv, ap);
    if (!(pap > 0)) break;
    const double alpha = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * pv[k];
      r[k] -= alpha * ap[k];
    }
    if (done()) {
      // confirm against the true residual before stopping
      scatter(x);
      apply(dense, ax);
      for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ax[k];
      if (done()) break;
    }
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag(k);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) pv[k] = z[k] + beta * pv[k];
  }
  return it;
}

double single_energy(const Grid& g, const std::vector<double>& u, double p) {
  // every edge with at least one endpoint inside the ball lies within the box
  NeumaierSum s;
  const std::size_t vol = u.size();
  for (std::size_t k = 0; k < vol; ++k) {
    const double uk = u[k];
    for (int a = 0; a < g.d; ++a) {
      const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(k) + g.off[2 * a + 1];
      if (j >= static_cast<std::ptrdiff_t>(vol)) continue;
      const double uj = u[static_cast<std::size_t>(j)];
      if (uk == 0.0 && uj == 0.0) continue;
      s.add(pow_abs(uk - uj, p));
    }
  }
  return s.value();
}

double node_defect(const Grid& g, const std::vector<double>& u, std::size_t k, double p) {
  double s = 0;
  for (int e = 0; e < g.deg; ++e) s += signed_pow(u[k] - u[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + g.off[e])], p);
  return s;
}

double max_defect(const Grid& g, const std::vector<double>& u, double p) {
  double m = 0;
  for (std::size_t k : g.free) m = std::max(m, std::abs(node_defect(g, u, k, p)));
  return m;
}

// Root of sum_j sign(x - v_j)|x - v_j|^{p-1} inside [min v, max v].
double local_solve(const double* v, int n, double p, double x0) {
  double lo = v[0], hi = v[0], mean = 0;
  for (int j = 0; j < n; ++j) {
    lo = std::min(lo, v[j]);
    hi = std::max(hi, v[j]);
    mean += v[j];
  }
  mean /= n;
  if (p == 2.0 || hi - lo == 0.0) return p == 2.0 ? mean : lo;
  double x = std::clamp(x0, lo, hi);
  for (int it = 0; it < 100; ++it) {
    double h = 0, dh = 0;
    bool singular = false;
    for (int j = 0; j < n; ++j) {
      const double t = x - v[j];
      h += signed_pow(t, p);
      if (t == 0.0) {
        if (p < 2.0) singular = true;
      } else {
        dh += (p - 1.0) * std::pow(std::abs(t), p - 2.0);
      }
    }
    if (h == 0.0) return x;
    if (h > 0) hi = x; else lo = x;
    double xn;
    if (!singular && dh > 0) {
      xn = x - h / dh;
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    } else {
      xn = 0.5 * (lo + hi);
    }
    if (std::abs(xn - x) <= 1e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-17) return xn;
    x = xn;
  }
  return x;
}

struct NonlinearStats {
  long iterations = 0;
  bool converged = false;
};

void newton_phase(const Grid& g, std::vector<double>& u, double p, const SolverOptions& opts) {
  const std::size_t n = g.free.size();
  if (n == 0) return;
  const double eps2 = 1e-10;
  std::vector<double> grad(n), w(n * static_cast<std::size_t>(g.deg)), diag(n), step(n), trial;
  double f = single_energy(g, u, p);
  for (long it = 0; it < opts.max_newton; ++it) {
    double gnorm2 = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = g.free[k];
      double gi = 0, di = 0;
      for (int e = 0; e < g.deg; ++e) {
        const double t = u[i] - u[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + g.off[e])];
        gi += p * signed_pow(t, p);
        const double we = p * (p - 1.0) * std::pow(t * t + eps2, 0.5 * (p - 2.0));
        w[k * g.deg + e] = we;
        di += we;
      }
      grad[k] = gi;
      diag[k] = di;
      gnorm2 += gi * gi;
    }
    if (std::sqrt(gnorm2) < 1e-13) break;
    std::vector<double> rhs(n);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = -grad[k];
    std::fill(step.begin(), step.end(), 0.0);
    auto apply = [&](const std::vector<double>& dense, std::vector<double>& out) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = g.free[k];
        double s = 0;
        for (int e = 0; e < g.deg; ++e)
          s += w[k * g.deg + e] * (dense[i] - dense[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + g.off[e])]);
        out[k] = s;
      }
    };
    pcg(g, apply, [&](std::size_t k) { return diag[k]; }, rhs, step, 1e-3, std::numeric_limits<double>::infinity(),
        std::max<long>(50, static_cast<long>(4 * std::cbrt(static_cast<double>(n)) * 10)));
    double slope = 0;
    for (std::size_t k = 0; k < n; ++k) slope += grad[k] * step[k];
    if (!(slope < 0)) break;
    double alpha = 1.0, fnew = f;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      trial = u;
      for (std::size_t k = 0; k < n; ++k) trial[g.free[k]] = u[g.free[k]] + alpha * step[k];
      fnew = single_energy(g, trial, p);
      if (fnew <= f + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double rel = (f - fnew) / std::max(f, 1e-300);
    u.swap(trial);
    f = fnew;
    if (rel < 1e-13) break;
  }
  for (std::size_t i : g.free) u[i] = std::clamp(u[i], 0.0, 1.0);
}

NonlinearStats gauss_seidel(const Grid& g, std::vector<double>& u, double p, const SolverOptions& opts) {
  NonlinearStats st;
  const std::size_t n = g.free.size();
  if (n == 0) {
    st.converged = true;
    return st;
  }
  std::vector<std::size_t> red, black;
  if (opts.schedule == SweepSchedule::RedBlack) {
    for (std::size_t i : g.free) {
      const LatticePoint pt = g.box.point(i);
      long s = 0;
      for (int a = 0; a < g.d; ++a) s += pt[a];
      ((s % 2 + 2) % 2 == 0 ? red : black).push_back(i);
    }
  }
  double f = single_energy(g, u, p);
  double nb[2 * kMaxDim];
  auto relax = [&](std::size_t i) {
    for (int e = 0; e < g.deg; ++e) nb[e] = u[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + g.off[e])];
    const double x = local_solve(nb, g.deg, p, u[i]);
    const double delta = std::abs(x - u[i]);
    u[i] = x;
    return delta;
  };
  for (long sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_update = 0;
    if (opts.schedule == SweepSchedule::RedBlack) {
      for (std::size_t i : red) max_update = std::max(max_update, relax(i));
      for (std::size_t i : black) max_update = std::max(max_update, relax(i));
    } else if (sweep % 2 == 0) {
      for (std::size_t i : g.free) max_update = std::max(max_update, relax(i));
    } else {
      for (auto it = g.free.rbegin(); it != g.free.rend(); ++it) max_update = std::max(max_update, relax(*it));
    }
    st.iterations = sweep + 1;
    const double fnew = single_energy(g, u, p);
    const double rel = (f - fnew) / std::max(f, 1e-300);
    f = fnew;
    if (max_update < opts.update_tol || rel < opts.energy_tol) {
      st.converged = true;
      break;
    }
  }
  return st;
}

}  // namespace

CapacityResult solve_on_domain(const LatticeSet& x, double p, const Domain& domain, const SolverOptions& opts,
                               const LatticeFunction* warm_start) {
  if (x.empty()) throw std::invalid_argument("capacity of an empty set");
  if (!(p > 1.0)) throw std::invalid_argument("capacity exponent must be > 1");
  const Grid g = build_grid(x, domain);
  const int d = x.dim();
  std::vector<double> u(g.box.volume(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (g.kind[k] == kOne) u[k] = 1.0;
  if (warm_start) {
    for (std::size_t k : g.free) u[k] = std::clamp((*warm_start)(g.box.point(k)), 0.0, 1.0);
  }

  CapacityResult res;
  res.p = p;
  res.n = static_cast<long>(x.size());
  res.domain = domain;
  res.unknowns = static_cast<long>(g.free.size());

  if (p == 2.0 && opts.linear_fast_path) {
    const std::size_t n = g.free.size();
    std::vector<double> b(n, 0.0), xs(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = g.free[k];
      for (int e = 0; e < g.deg; ++e)
        if (g.kind[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + g.off[e])] == kOne) b[k] += 1.0;
      xs[k] = u[i];
    }
    const double deg = g.deg;
    auto apply = [&](const std::vector<double>& dense, std::vector<double>& out) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = g.free[k];
        double s = deg * dense[i];
        for (int e = 0; e < g.deg; ++e) s -= dense[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + g.off[e])];
        out[k] = s;
      }
    };
    const long max_it = opts.max_iterations > 0 ? opts.max_iterations : 10 * static_cast<long>(std::max<std::size_t>(n, 1));
    // free entries of the dense vector must be zero for the operator: fixed nodes enter through b
    res.iterations = pcg(g, apply, [&](std::size_t) { return deg; }, b, xs, opts.tolerance, 1e-11, max_it);
    for (std::size_t k = 0; k < n; ++k) u[g.free[k]] = std::clamp(xs[k], 0.0, 1.0);
    res.residual = max_defect(g, u, p);
    res.converged = res.iterations < max_it && res.residual <= 1e-10;
  } else {
    if (opts.newton_warm_start) newton_phase(g, u, p, opts);
    const NonlinearStats st = gauss_seidel(g, u, p, opts);
    res.iterations = st.iterations;
    res.converged = st.converged;
    res.residual = max_defect(g, u, p);
  }

  const double single = single_energy(g, u, p);
  res.raw_value = 2.0 * single;
  res.value = scale_factor(p, d, res.n) * res.raw_value;
  LatticeFunction pot(g.box);
  pot.values() = std::move(u);
  res.potential = pot.trimmed();
  return res;
}

void apply_truncation_correction(CapacityResult& r, int d) {
  const double p = r.p;
  r.truncation_radius = r.domain.radius;
  if (!(p > 1.0 && p < d)) return;
  const double capb = cap_p_ball(p, d);
  const double a = (p - d) / (p - 1.0);
  const double e1 = r.raw_value / 2.0;
  double e = e1, reff = 0;
  for (int it = 0; it < 50; ++it) {
    reff = std::pow(e / capb, 1.0 / (d - p));
    const double R = r.domain.radius / reff;
    if (!(R > 1.0)) return;
    const double next = e1 * std::pow(1.0 - std::pow(R, a), p - 1.0);
    if (std::abs(next - e) <= 1e-15 * e) {
      e = next;
      break;
    }
    e = next;
  }
  r.effective_radius = reff;
  r.corrected_value = scale_factor(p, d, r.n) * 2.0 * e;
}

CapacityResult relative_capacity(const LatticeSet& x, double R, const SolverOptions& opts,
                                 const LatticeFunction* warm_start) {
  if (x.dim() < 2) throw std::invalid_argument("relative capacity needs d >= 2");
  if (x.empty()) throw std::invalid_argument("relative capacity of an empty set");
  return solve_on_domain(x, 2.0, relative_domain(x, R), opts, warm_start);
}

CapacityResult p_capacity(const LatticeSet& x, double p, const CapacityOptions& opts) {
  if (x.empty()) throw std::invalid_argument("capacity of an empty set");
  const int d = x.dim();
  if (!(p > 1.0 && p < d)) throw std::invalid_argument("p-capacity needs 1 < p < d");
  Domain dom;
  if (opts.domain) {
    dom = *opts.domain;
  } else {
    dom.center = rounded_barycenter(x);
    dom.radius = opts.truncation_factor * (diameter(x) + std::pow(static_cast<double>(x.size()), 1.0 / d));
  }
  CapacityResult r = solve_on_domain(x, p, dom, opts.solver, opts.warm_start);
  if (opts.correct_truncation) apply_truncation_correction(r, d);
  else r.truncation_radius = dom.radius;
  return r;
}

PotentialReport verify_potential(const LatticeFunction& u, const LatticeSet& x, double p,
                                 const std::optional<Domain>& domain) {
  PotentialReport rep;
  for (double v : u.values()) rep.bound_violation = std::max({rep.bound_violation, -v, v - 1.0});
  for (const auto& pt : x) rep.constraint_violation = std::max(rep.constraint_violation, std::abs(u(pt) - 1.0));
  Box scan = u.box().volume() ? u.box().grown(1) : Box{};
  if (domain) {
    const int m = static_cast<int>(std::ceil(domain->radius)) + 1;
    LatticePoint lo = domain->center, hi = domain->center;
    for (int a = 0; a < u.dim(); ++a) {
      lo[a] -= m;
      hi[a] += m;
    }
    scan = Box(lo, hi);
  }
  for (std::size_t k = 0; k < scan.volume(); ++k) {
    const LatticePoint pt = scan.point(k);
    if (x.contains(pt)) continue;
    if (domain && !domain->interior(pt)) continue;
    const double ui = u(pt);
    double s = 0;
    for (const auto& nb : neighbors(pt)) s += signed_pow(ui - u(nb), p);
    if (std::abs(s) > rep.harmonic_defect) {
      rep.harmonic_defect = std::abs(s);
      rep.worst_node = pt;
    }
  }
  return rep;
}

EigenResult eigen_ground_state(const LatticeSet& x, const EigenOptions& opts, const LatticeFunction* warm_start) {
  if (x.empty()) throw std::invalid_argument("eigenvalue of an empty set");
  const int d = x.dim();
  const std::size_t n = x.size();
  const auto& pts = x.points();
  std::unordered_map<LatticePoint, std::size_t, LatticePointHash> index;
  for (std::size_t k = 0; k < n; ++k) index.emplace(pts[k], k);
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t k = 0; k < n; ++k)
    for (const auto& nb : neighbors(pts[k]))
      if (auto it = index.find(nb); it != index.end()) adj[k].push_back(it->second);
  const double deg = 2.0 * d;
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) {
      double s = deg * v[k];
      for (std::size_t j : adj[k]) s -= v[j];
      out[k] = s;
    }
  };
  // L^{-1} through plain CG (L is SPD with spectrum in (0, 4d])
  auto solve = [&](const std::vector<double>& b, std::vector<double>& y) {
    std::vector<double> r(n), pv(n), ap(n);
    apply(y, ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
    pv = r;
    double rr = dot(r, r);
    const double bn = dot(b, b);
    for (std::size_t it = 0; it < 10 * n + 100 && rr > 1e-30 * bn; ++it) {
      apply(pv, ap);
      const double alpha = rr / dot(pv, ap);
      for (std::size_t k = 0; k < n; ++k) {
        y[k] += alpha * pv[k];
        r[k] -= alpha * ap[k];
      }
      const double rn = dot(r, r);
      for (std::size_t k = 0; k < n; ++k) pv[k] = r[k] + rn / rr * pv[k];
      rr = rn;
    }
  };

  std::vector<double> v(n, 1.0), y(n), lv(n);
  if (warm_start)
    for (std::size_t k = 0; k < n; ++k) v[k] = std::max((*warm_start)(pts[k]), 1e-3);
  auto normalize = [&](std::vector<double>& a) {
    const double s = std::sqrt(dot(a, a));
    for (double& t : a) t /= s;
  };
  normalize(v);
  EigenResult res;
  double lambda = 0;
  for (long it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    y = v;  // previous iterate is a good initial guess up to scale
    for (double& t : y) t /= std::max(lambda, 1e-12);
    if (lambda == 0) std::fill(y.begin(), y.end(), 0.0);
    solve(v, y);
    normalize(y);
    v.swap(y);
    apply(v, lv);
    lambda = dot(v, lv);
    double r2 = 0;
    for (std::size_t k = 0; k < n; ++k) r2 += (lv[k] - lambda * v[k]) * (lv[k] - lambda * v[k]);
    res.residual = std::sqrt(r2);
    if (res.residual <= opts.tolerance * lambda) {
      res.converged = true;
      break;
    }
  }
  double sum = 0;
  for (double t : v) sum += t;
  const double scale = (sum < 0 ? -1.0 : 1.0) * std::sqrt(static_cast<double>(n));
  res.eigenvalue = lambda;
  LatticeFunction f(x.bounding_box());
  for (std::size_t k = 0; k < n; ++k) f.values()[f.box().index(pts[k])] = v[k] * scale;
  res.eigenfunction = f;
  return res;
}

std::vector<TruncationRow> truncation_study(const LatticeSet& x, double p, const std::vector<double>& radii,
                                            const SolverOptions& opts) {
  if (!std::is_sorted(radii.begin(), radii.end())) throw std::invalid_argument("truncation radii must increase");
  std::vector<TruncationRow> rows;
  const LatticePoint c = rounded_barycenter(x);
  const LatticeFunction* warm = nullptr;
  CapacityResult prev;
  for (double r : radii) {
    CapacityResult res = solve_on_domain(x, p, Domain{c, r}, opts, warm);
    apply_truncation_correction(res, x.dim());
    rows.push_back(TruncationRow{r, res.raw_value, res.value, res.corrected_value});
    prev = std::move(res);
    warm = &prev.potential;
  }
  return rows;
}

}  // namespace isocap
