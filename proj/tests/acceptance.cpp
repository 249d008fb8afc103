// Acceptance gate. `acceptance [criterion...]` runs the listed criteria (all when none are given)
// and prints one [PASS]/[FAIL] line per criterion; the exit code is nonzero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "isocap/capacity.hpp"
#include "isocap/continuum.hpp"
#include "isocap/embedding.hpp"
#include "isocap/energy.hpp"
#include "isocap/experiment.hpp"
#include "isocap/numeric.hpp"
#include "isocap/optimizer.hpp"
#include "isocap/rearrangement.hpp"
#include "support.hpp"

using namespace isocap;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string errors_list(const ConvergenceReport& r) {
  std::string s;
  for (const auto& rec : r.records) s += fmt("%s%g:%.2f%%", s.empty() ? "" : " ", rec.k, 100 * rec.relative_error());
  return s;
}

bool strictly_decreasing(const ConvergenceReport& r) {
  for (std::size_t k = 1; k < r.records.size(); ++k)
    if (!(r.records[k].relative_error() < r.records[k - 1].relative_error())) return false;
  return true;
}

Verdict convergence_p2() {
  const auto t0 = Clock::now();
  ConvergenceOptions co;
  co.p = 2.0;
  co.ks = {4, 5, 6, 7, 8, 9, 10};
  co.truncation_factor = 1.5;
  const ConvergenceReport r = run_convergence(co);
  const double secs = seconds_since(t0);
  const double target = std::pow(4 * std::numbers::pi / 3, -1.0 / 3) * 4 * std::numbers::pi;
  const bool target_ok = std::abs(r.records.front().target - target) <= 1e-12 * target;
  const double last = r.records.back().relative_error();
  const bool pass = target_ok && strictly_decreasing(r) && last <= 0.10 && r.fitted_exponent >= -0.55 &&
                    r.fitted_exponent <= -0.15 && secs <= 300;
  return {pass, fmt("rel. errors [%s], monotone=%d, exponent %.3f, %.0f s", errors_list(r).c_str(),
                    strictly_decreasing(r), r.fitted_exponent, secs)};
}

Verdict convergence_p15() {
  const auto t0 = Clock::now();
  ConvergenceOptions co;
  co.p = 1.5;
  co.ks = {4, 5, 6, 7, 8};
  co.truncation_factor = 1.0;
  const ConvergenceReport r = run_convergence(co);
  const double secs = seconds_since(t0);
  const double target = std::pow(4 * std::numbers::pi / 3, -0.5) * std::sqrt(3.0) * 4 * std::numbers::pi;
  const bool target_ok = std::abs(r.records.front().target - target) <= 1e-12 * target;
  const double last = r.records.back().relative_error();
  const bool pass = target_ok && strictly_decreasing(r) && last <= 0.20 && secs <= 900;
  return {pass, fmt("rel. errors [%s], monotone=%d, %.0f s (lattice anisotropy factor %.3f)", errors_list(r).c_str(),
                    strictly_decreasing(r), secs, lattice_anisotropy(1.5, 3))};
}

// p = 2 defect recomputed from the potential: sum of u_i - u_j over the 2d neighbours
double free_node_defect(const LatticeFunction& u, const LatticeSet& x, const Domain& dom) {
  const int d = x.dim();
  const int r = static_cast<int>(std::ceil(dom.radius)) + 1;
  LatticePoint lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = dom.center[a] - r;
    hi[a] = dom.center[a] + r;
  }
  const Box box(lo, hi);
  double worst = 0;
  for (std::size_t k = 0; k < box.volume(); ++k) {
    const LatticePoint i = box.point(k);
    if (x.contains(i) || !dom.interior(i)) continue;
    double s = 0;
    for (const auto& j : neighbors(i)) s += u(i) - u(j);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

Verdict harmonicity() {
  std::mt19937_64 rng(3001);
  int cases = 0, bad = 0;
  double worst = 0;
  long max_unknowns = 0;
  for (long n : {1L, 2L, 5L, 10L, 20L, 40L, 80L, 150L, 300L})
    for (double R : {1.5, 2.0, 3.0, 4.0}) {
      const LatticeSet x = oracle::random_connected(rng, 3, n);
      const Domain dom = relative_domain(x, R);
      if (!std::all_of(x.begin(), x.end(), [&](const LatticePoint& p) { return dom.interior(p); })) continue;
      const CapacityResult c = relative_capacity(x, R);
      if (c.unknowns > 10000) continue;
      ++cases;
      max_unknowns = std::max(max_unknowns, c.unknowns);
      const double own = free_node_defect(c.potential, x, dom);
      const double lib = verify_potential(c.potential, x, 2.0, dom).harmonic_defect;
      const double w = std::max(own, lib);
      worst = std::max(worst, w);
      bad += !(w <= 1e-10) || !c.converged;
    }
  return {bad == 0 && cases >= 20,
          fmt("%d potentials (up to %ld unknowns), max defect %.2e, %d above 1e-10", cases, max_unknowns, worst, bad)};
}

std::vector<double> nonzero_sorted(const LatticeFunction& u) {
  std::vector<double> v;
  for (double x : u.values())
    if (x != 0) v.push_back(x);
  std::sort(v.begin(), v.end());
  return v;
}

Verdict rearrangement_monotone() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(3002);
  std::uniform_real_distribution<double> P(1.05, 4.0);
  int violations = 0, multiset_bad = 0;
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + t % 2;
    const LatticeFunction u = oracle::random_function(rng, d, 6);
    const auto dirs = rearrangement_directions(d);
    const Direction xi = dirs[std::uniform_int_distribution<std::size_t>(0, dirs.size() - 1)(rng)];
    const double p = P(rng);
    const LatticeFunction s = symmetrize_direction(u, xi);
    const double before = oracle::energy(u, p), after = oracle::energy(s, p);
    const double excess = (after - before) / std::max(1.0, before);
    worst = std::max(worst, excess);
    violations += excess > 1e-12;
    multiset_bad += nonzero_sorted(s) != nonzero_sorted(u);
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && multiset_bad == 0 && secs <= 60,
          fmt("1000 cases, %d energy violations (worst excess %.1e), %d multiset changes, %.1f s", violations,
              std::max(0.0, worst), multiset_bad, secs)};
}

Verdict decomposition() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> P(1.1, 3.5);
  int bad = 0, cases = 0;
  double worst = 0;
  for (bool diagonal : {false, true})
    for (int t = 0; t < 100; ++t) {
      const int d = 2 + t % 2;
      std::vector<Direction> dirs;
      for (const auto& xi : rearrangement_directions(d))
        if (xi.is_coordinate() != diagonal) dirs.push_back(xi);
      const Direction xi = dirs[std::uniform_int_distribution<std::size_t>(0, dirs.size() - 1)(rng)];
      const LatticeFunction u = oracle::random_function(rng, d);
      const double p = P(rng);
      const double e = oracle::energy(u, p);
      const double gap = std::abs(decompose_energy(u, xi, p).recombined() - e) / std::max(e, 1e-300);
      worst = std::max(worst, gap);
      bad += gap > 1e-12;
      ++cases;
    }
  return {bad == 0, fmt("%d cases (100 coordinate, 100 diagonal), max rel. gap %.1e", cases, worst)};
}

bool unimodal(const std::vector<double>& v) {
  std::size_t k = 0;
  while (k + 1 < v.size() && v[k] <= v[k + 1]) ++k;
  while (k + 1 < v.size() && v[k] >= v[k + 1]) ++k;
  return k + 1 >= v.size();
}

Verdict one_d_optimality() {
  std::mt19937_64 rng(3004);
  std::uniform_int_distribution<int> len(1, 8), grid(1, 4);
  std::uniform_real_distribution<double> P(1.1, 3.5), U(0.01, 1.0);
  int attained = 0, non_unimodal = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(static_cast<std::size_t>(len(rng)));
    for (auto& x : v) x = t % 2 ? U(rng) : grid(rng);  // odd trials: continuous; even: ties
    const double p = P(rng);
    std::sort(v.begin(), v.end());
    std::vector<double> energies;
    std::vector<std::vector<double>> arrangements;
    do {
      energies.push_back(energy_1d(Sequence{0, v}, p));
      arrangements.push_back(v);
    } while (std::next_permutation(v.begin(), v.end()));
    const double best = *std::min_element(energies.begin(), energies.end());
    const double tol = 1e-12 * std::max(1.0, best);
    const double sym = energy_1d(symmetrize_1d(Sequence{0, v}), p);
    attained += sym <= best + tol;
    for (std::size_t k = 0; k < energies.size(); ++k)
      if (energies[k] <= best + tol && !unimodal(arrangements[k])) ++non_unimodal;
  }
  return {attained == 100 && non_unimodal == 0,
          fmt("symmetrization optimal in %d/100 multisets, %d non-unimodal exhaustive minimizers", attained,
              non_unimodal)};
}

Verdict min_max() {
  std::mt19937_64 rng(3005);
  std::uniform_real_distribution<double> U(0.0, 10.0);
  std::uniform_int_distribution<int> G(0, 6);
  const double ps[] = {1.2, 2.0, 3.7};
  long violations = 0, equalities = 0, bad_equalities = 0;
  for (long t = 0; t < 100000; ++t) {
    const double p = ps[t % 3];
    const bool on_grid = (t / 3) % 2 == 0;
    auto draw = [&] { return on_grid ? static_cast<double>(G(rng)) : U(rng); };
    const double a1 = draw(), a2 = draw(), b1 = draw(), b2 = draw();
    const double lhs = std::pow(std::abs(std::min(a1, a2) - std::min(b1, b2)), p) +
                       std::pow(std::abs(std::max(a1, a2) - std::max(b1, b2)), p);
    const double rhs = std::pow(std::abs(a1 - b1), p) + std::pow(std::abs(a2 - b2), p);
    violations += lhs > rhs + 1e-12 * std::max(1.0, rhs);
    if (std::abs(rhs - lhs) <= 1e-15 * std::max(1.0, rhs)) {
      ++equalities;
      bad_equalities += (a1 - a2) * (b1 - b2) < 0;
    }
  }
  return {violations == 0 && bad_equalities == 0,
          fmt("1e5 quadruples, %ld violations, %ld equalities of which %ld with opposite ordering", violations,
              equalities, bad_equalities)};
}

Verdict interpolation() {
  std::mt19937_64 rng(3006);
  double worst2 = 0, worstp = 0;
  for (int t = 0; t < 100; ++t) {
    const LatticeFunction u = oracle::random_function(rng, 2 + t % 2);
    const double e2 = oracle::energy(u, 2.0);
    worst2 = std::max(worst2, std::abs(interpolation_energy(u, 2.0, GradientNorm::L2).reconciled - e2) / e2);
    for (double p : {1.5, 2.5}) {
      const double ep = oracle::energy(u, p);
      worstp = std::max(worstp, std::abs(interpolation_energy(u, p, GradientNorm::Lp).reconciled - ep) / ep);
    }
  }
  return {worst2 <= 1e-9 && worstp <= 1e-9,
          fmt("100 functions, l2 mode max rel. gap %.1e, lp mode (p = 1.5, 2.5) %.1e", worst2, worstp)};
}

Verdict descent() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(3007);
  std::uniform_int_distribution<long> N(2, 60);
  const auto dirs = rearrangement_directions(3);
  long increases = 0, card_bad = 0, recheck_bad = 0, changed = 0;
  double worst = 0;
  for (int t = 0; t < 500; ++t) {
    const LatticeSet x = oracle::random_connected(rng, 3, N(rng));
    double reach = 0;
    for (const auto& p : x) reach = std::max(reach, p.norm());
    Objective obj = Objective::p_capacity(2.0);
    obj.fixed_domain = Domain{LatticePoint(3), reach + 3.0};
    ObjectiveEvaluator ev(obj);
    const Evaluation e = ev.evaluate(x);
    const Direction xi = dirs[std::uniform_int_distribution<std::size_t>(0, dirs.size() - 1)(rng)];
    const DescentResult r = descent_step(x, e, xi, ev);
    card_bad += r.set.size() != x.size();
    changed += r.changed;
    const double inc = r.eval.value - e.value;
    worst = std::max(worst, inc);
    increases += inc > 1e-9;
    if (t % 10 == 0) {  // independent solve of the new set
      const CapacityResult c = solve_on_domain(r.set, 2.0, *obj.fixed_domain);
      recheck_bad += std::abs(c.value - r.eval.value) > 1e-9 * c.value;
    }
  }
  const double secs = seconds_since(t0);
  return {increases == 0 && card_bad == 0 && recheck_bad == 0,
          fmt("500 steps (%ld changed the set), %ld increases (max %.1e), %ld cardinality changes, %ld re-solve "
              "mismatches, %.0f s",
              changed, increases, std::max(0.0, worst), card_bad, recheck_bad, secs)};
}

Verdict fluctuation() {
  const auto t0 = Clock::now();
  FluctuationOptions fo;
  fo.ns = {33, 100, 300, 1000};
  fo.restarts = 3;
  BestKnownLedger ledger;
  const FluctuationReport r = run_fluctuation(fo, ledger);
  const double secs = seconds_since(t0);
  bool finite = true;
  std::string ratios;
  for (const auto& rec : r.records) {
    finite = finite && std::isfinite(rec.ratio) && rec.ratio >= 0;
    ratios += fmt("%s%ld:%.3f", ratios.empty() ? "" : " ", rec.n, rec.ratio);
  }
  // recompute the summary statistics from the rows
  std::vector<double> n, ratio;
  for (const auto& rec : r.records) {
    n.push_back(static_cast<double>(rec.n));
    ratio.push_back(rec.ratio);
  }
  const double mx = *std::max_element(ratio.begin(), ratio.end());
  const double med = median(ratio);
  const double rho = spearman(n, ratio);
  bool consistent = true;
  for (const auto& c : r.consistency) consistent = consistent && c.holds;
  const bool pass = finite && med > 0 && mx / med <= 5 && rho <= 0.5 && consistent && secs <= 1800;
  return {pass, fmt("ratios [%s], max/median %.2f, Spearman %.2f, consistency %s, %.0f s", ratios.c_str(),
                    med > 0 ? mx / med : INFINITY, rho, consistent ? "ok" : "violated", secs)};
}

Verdict structure() {
  const Objective obj = Objective::p_capacity(2.0);
  int runs = 0, nonconvex = 0, level_bad = 0, diam_soft = 0, per_soft = 0, unconverged = 0;
  double worst_diam = 0, worst_per = 0;
  for (long n : {33L, 100L, 300L})
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      Budget b;
      b.seed = seed;
      b.perturb = seed == 1 ? 0 : static_cast<long>(std::ceil(0.1 * static_cast<double>(n)));
      const SearchState st = minimize(3, n, obj, b);
      ++runs;
      unconverged += !st.converged;
      // direction convexity recomputed here by scanning every axis-parallel line
      bool convex = true;
      for (int axis = 0; axis < 3; ++axis)
        for (const auto& p : st.best)
          for (int s = 2; s <= 40 && convex; ++s)
            if (st.best.contains(p.shifted(axis, s)) && !st.best.contains(p.shifted(axis, 1))) convex = false;
      const AuditReport a = structural_audit(st.best, obj);
      nonconvex += !convex || !a.all_convex;
      level_bad += !a.level_set_matches;
      const double dr = diameter(st.best) / std::cbrt(static_cast<double>(n));
      const double pr = scaled_perimeter(st.best) / scaled_perimeter(quasi_ball(3, n));
      worst_diam = std::max(worst_diam, dr);
      worst_per = std::max(worst_per, pr);
      diam_soft += dr > 3;
      per_soft += pr > 2;
    }
  return {nonconvex == 0,
          fmt("%d minimizers (N = 33, 100, 300; %d hit the sweep cap), non-convex %d [hard]; soft: max diam/N^(1/3) "
              "%.2f (%d above 3), max P_N/P_N(ball) %.2f (%d above 2), level set mismatches %d",
              runs, unconverged, nonconvex, worst_diam, diam_soft, worst_per, per_soft, level_bad)};
}

Verdict eigen() {
  const EigenResult single = eigen_ground_state(LatticeSet(3, {LatticePoint(3)}));
  const bool exact = single.eigenvalue == 6.0;
  std::mt19937_64 rng(3012);
  double worst = 0;
  int cases = 0;
  for (int t = 0; t < 60; ++t) {
    const int d = 2 + t % 2;
    const long n = 2 + t % 29;
    const LatticeSet x = oracle::random_connected(rng, d, n);
    worst = std::max(worst, std::abs(eigen_ground_state(x).eigenvalue - oracle::dense_eigen(x).lambda));
    ++cases;
  }
  const LatticeSet pair(3, {LatticePoint(3), LatticePoint{1, 0, 0}});
  worst = std::max(worst, std::abs(eigen_ground_state(pair).eigenvalue - 5.0));
  return {exact && worst <= 1e-10,
          fmt("singleton lambda = %.17g, %d dense comparisons (N <= 30), max gap %.1e", single.eigenvalue, cases + 1,
              worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"continuum limit, p = 2", convergence_p2},
      {"continuum limit, p = 1.5", convergence_p15},
      {"harmonicity of relative potentials", harmonicity},
      {"rearrangement monotonicity", rearrangement_monotone},
      {"energy decomposition", decomposition},
      {"one-dimensional optimality", one_d_optimality},
      {"min-max inequality", min_max},
      {"interpolation energy", interpolation},
      {"symmetrization descent", descent},
      {"fluctuation ratio", fluctuation},
      {"minimizer structure", structure},
      {"eigen ground state", eigen},
  };
  std::vector<int> which;
  for (int a = 1; a < argc; ++a) which.push_back(std::atoi(argv[a]));
  if (which.empty())
    for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) which.push_back(c);

  int failed = 0;
  for (int c : which) {
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::printf("[FAIL] criterion %d: no such criterion\n", c);
      ++failed;
      continue;
    }
    const auto& [name, run] = criteria[static_cast<std::size_t>(c - 1)];
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", c, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
