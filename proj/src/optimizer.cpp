#include "isocap/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isocap/numeric.hpp"
#include "isocap/rearrangement.hpp"

namespace isocap {

Objective Objective::p_capacity(double p, double domain_factor) {
  Objective o;
  o.kind = ObjectiveKind::PCapacity;
  o.p = p;
  o.domain_factor = domain_factor;
  return o;
}

Objective Objective::relative(double R) {
  Objective o;
  o.kind = ObjectiveKind::Relative;
  o.p = 2.0;
  o.R = R;
  return o;
}

Objective Objective::eigenvalue() {
  Objective o;
  o.kind = ObjectiveKind::Eigen;
  o.p = 2.0;
  return o;
}

Domain Objective::domain_for(int d, long n) const {
  if (fixed_domain) return *fixed_domain;
  const double scale = std::pow(static_cast<double>(n), 1.0 / d);
  return Domain{LatticePoint(d), (kind == ObjectiveKind::Relative ? R : domain_factor) * scale};
}

std::string Objective::label() const {
  switch (kind) {
    case ObjectiveKind::PCapacity: return "pcap";
    case ObjectiveKind::Relative: return "relative";
    case ObjectiveKind::Eigen: return "eigen";
  }
  return "?";
}

double Objective::param() const {
  switch (kind) {
    case ObjectiveKind::PCapacity: return p;
    case ObjectiveKind::Relative: return R;
    case ObjectiveKind::Eigen: return 0.0;
  }
  return 0.0;
}

std::vector<int> canonical_key(const LatticeSet& x, bool translate) {
  const int d = x.dim();
  std::array<int, kMaxDim> perm{};
  std::iota(perm.begin(), perm.begin() + d, 0);
  std::vector<int> best, cur;
  std::vector<LatticePoint> img(x.size());
  do {
    for (unsigned signs = 0; signs < (1u << d); ++signs) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        LatticePoint q(d);
        for (int a = 0; a < d; ++a) q[a] = ((signs >> a) & 1u ? -1 : 1) * x.points()[k][perm[a]];
        img[k] = q;
      }
      if (translate && !img.empty()) {
        LatticePoint lo = img.front();
        for (const auto& q : img)
          for (int a = 0; a < d; ++a) lo[a] = std::min(lo[a], q[a]);
        for (auto& q : img) q -= lo;
      }
      std::sort(img.begin(), img.end());
      cur.clear();
      cur.push_back(d);
      for (const auto& q : img)
        for (int a = 0; a < d; ++a) cur.push_back(q[a]);
      if (best.empty() || cur < best) best = cur;
    }
  } while (std::next_permutation(perm.begin(), perm.begin() + d));
  return best;
}

Evaluation ObjectiveEvaluator::evaluate(const LatticeSet& x, const LatticeFunction* warm) {
  Evaluation e;
  ++solves_;
  if (obj_.kind == ObjectiveKind::Eigen) {
    EigenResult r = eigen_ground_state(x, obj_.eigen, warm);
    e.value = r.eigenvalue;
    e.potential = std::move(r.eigenfunction);
    e.converged = r.converged;
    e.residual = r.residual;
  } else {
    CapacityResult r = solve_on_domain(x, obj_.exponent(), obj_.domain_for(x.dim(), static_cast<long>(x.size())),
                                       obj_.solver, warm);
    e.value = r.value;
    e.potential = std::move(r.potential);
    e.converged = r.converged;
    e.residual = r.residual;
  }
  cache_[canonical_key(x, !obj_.uses_domain())] = e.value;
  return e;
}

double ObjectiveEvaluator::value(const LatticeSet& x, const LatticeFunction* warm) {
  const auto key = canonical_key(x, !obj_.uses_domain());
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  return evaluate(x, warm).value;
}

bool ObjectiveEvaluator::admissible_point(const LatticePoint& i, long n) const {
  if (!obj_.uses_domain()) return true;
  return obj_.domain_for(i.dim(), n).interior(i);
}

bool ObjectiveEvaluator::feasible(const LatticeSet& x) const {
  for (const auto& p : x)
    if (!admissible_point(p, static_cast<long>(x.size()))) return false;
  return true;
}

LatticeSet quasi_ball(int d, long n) {
  if (n < 1) throw std::invalid_argument("quasi_ball needs N >= 1");
  // grow the enumeration radius until it holds N points
  double r = std::max(1.0, std::pow(static_cast<double>(n), 1.0 / d));
  for (;;) {
    const LatticeSet ball = lattice_ball(r, LatticePoint(d));
    if (static_cast<long>(ball.size()) >= n) {
      std::vector<LatticePoint> pts = ball.points();
      std::stable_sort(pts.begin(), pts.end(),
                       [](const LatticePoint& a, const LatticePoint& b) { return a.norm2() < b.norm2(); });
      pts.resize(static_cast<std::size_t>(n));
      return LatticeSet(d, std::move(pts));
    }
    r *= 1.3;
  }
}

namespace {

long exterior_count(const LatticePoint& p, const LatticeSet& x) {
  long c = 0;
  for (const auto& nb : neighbors(p)) c += !x.contains(nb);
  return c;
}

}  // namespace

DescentResult descent_step(const LatticeSet& x, const Evaluation& current, const Direction& xi,
                           ObjectiveEvaluator& ev) {
  DescentResult out{x, current, false, 0};
  const bool eigen = ev.objective().kind == ObjectiveKind::Eigen;
  LatticeFunction u = current.potential;
  if (eigen)
    for (double& v : u.values()) v = std::max(v, 0.0);
  const LatticeFunction us = symmetrize_direction(u, xi);
  std::vector<LatticePoint> pts;
  for (std::size_t k = 0; k < us.values().size(); ++k) {
    const double v = us.values()[k];
    if (eigen ? v > 0.0 : v == 1.0) pts.push_back(us.box().point(k));
  }
  const std::size_t n = x.size();
  if (pts.size() < n || (eigen && pts.size() != n)) return out;
  if (pts.size() > n) {
    // u* equals 1 on more than N nodes: drop the most exposed ones; any subset keeps u* admissible
    const LatticeSet full(x.dim(), pts);
    std::stable_sort(pts.begin(), pts.end(), [&](const LatticePoint& a, const LatticePoint& b) {
      const long ea = exterior_count(a, full), eb = exterior_count(b, full);
      return ea != eb ? ea < eb : a < b;
    });
    out.trimmed = static_cast<long>(pts.size() - n);
    pts.resize(n);
  }
  LatticeSet xs(x.dim(), std::move(pts));
  if (xs == x || !ev.feasible(xs)) return out;
  out.eval = ev.evaluate(xs, &us);
  out.set = std::move(xs);
  out.changed = true;
  return out;
}

LatticeSet symmetrization_descent_step(const LatticeSet& x, const Direction& xi, const Objective& objective) {
  ObjectiveEvaluator ev(objective);
  if (!ev.feasible(x)) throw ConstraintViolation("set does not fit the objective's domain");
  const Evaluation e = ev.evaluate(x);
  return descent_step(x, e, xi, ev).set;
}

ExchangeOutcome exchange_move(const LatticeSet& x, const Evaluation& current, ObjectiveEvaluator& ev,
                              std::mt19937_64& rng, AcceptMode mode, double temperature, int top_k) {
  ExchangeOutcome out;
  out.set = x;
  out.eval = current;
  if (x.size() < 2) return out;
  const bool eigen = ev.objective().kind == ObjectiveKind::Eigen;
  const double p = ev.objective().exponent();
  const LatticeFunction& u = current.potential;
  const long n = static_cast<long>(x.size());

  std::vector<std::pair<double, LatticePoint>> removal, addition;
  std::vector<LatticePoint> seen;
  for (const auto& pt : x) {
    bool boundary = false;
    double flux = 0;
    for (const auto& nb : neighbors(pt)) {
      if (x.contains(nb)) continue;
      boundary = true;
      flux += signed_pow(1.0 - u(nb), p);
      if (ev.admissible_point(nb, n)) seen.push_back(nb);
    }
    // capacity drops most when an exposed (high-flux) point leaves; the ground state least when u is small
    if (boundary) removal.emplace_back(eigen ? u(pt) : -flux, pt);
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  for (const auto& y : seen) {
    double score = 0;
    if (eigen) {
      for (const auto& nb : neighbors(y))
        if (x.contains(nb)) score += u(nb);
    } else {
      score = u(y);
    }
    addition.emplace_back(-score, y);  // ascending sort puts the best first
  }
  if (removal.empty() || addition.empty()) return out;
  std::sort(removal.begin(), removal.end());
  std::sort(addition.begin(), addition.end());
  auto pick = [&](const auto& v) {
    const std::size_t m = std::min<std::size_t>(v.size(), static_cast<std::size_t>(std::max(1, top_k)));
    return v[std::uniform_int_distribution<std::size_t>(0, m - 1)(rng)].second;
  };
  const LatticePoint x0 = pick(removal);
  const LatticePoint y0 = pick(addition);
  out.removed = x0;
  out.added = y0;
  std::vector<LatticePoint> pts;
  pts.reserve(x.size());
  for (const auto& pt : x)
    if (!(pt == x0)) pts.push_back(pt);
  pts.push_back(y0);
  LatticeSet cand(x.dim(), std::move(pts));

  auto accept = [&](double delta) {
    if (delta <= 0.0) return true;
    if (mode == AcceptMode::Greedy || !(temperature > 0)) return false;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < std::exp(-delta / temperature);
  };
  // cheap rejection through the cache first
  const double cached = ev.value(cand, &u);
  out.delta = cached - current.value;
  if (!accept(out.delta)) return out;
  out.eval = ev.evaluate(cand, &u);
  out.delta = out.eval.value - current.value;
  if (mode == AcceptMode::Greedy && out.delta > 0.0) {
    out.eval = current;
    return out;
  }
  out.accepted = true;
  out.set = std::move(cand);
  return out;
}

SearchState minimize(int d, long n, const Objective& objective, const Budget& budget) {
  std::mt19937_64 rng(budget.seed);
  ObjectiveEvaluator ev(objective);
  SearchState st;
  st.seed = budget.seed;
  LatticeSet x = quasi_ball(d, n);
  if (!ev.feasible(x)) throw ConstraintViolation("initial quasi-ball does not fit the objective's domain");
  Evaluation cur = ev.evaluate(x);
  st.history.push_back({"init", cur.value});

  for (long k = 0; k < budget.perturb; ++k) {
    ExchangeOutcome o = exchange_move(x, cur, ev, rng, AcceptMode::Anneal, std::numeric_limits<double>::infinity(),
                                      budget.top_k * 3);
    if (o.accepted) {
      x = std::move(o.set);
      cur = std::move(o.eval);
      st.history.push_back({"perturb", cur.value});
    }
  }

  st.best = x;
  st.best_value = cur.value;
  st.best_eval = cur;
  auto note_best = [&] {
    if (cur.value < st.best_value) {
      st.best = x;
      st.best_value = cur.value;
      st.best_eval = cur;
    }
  };

  double temperature = 0.0;
  long proposals = 0;
  if (budget.mode == AcceptMode::Anneal && n >= 2) {
    std::vector<double> deltas;
    for (int k = 0; k < 50; ++k) deltas.push_back(std::abs(exchange_move(x, cur, ev, rng, AcceptMode::Greedy, 0.0, budget.top_k).delta));
    temperature = median(deltas);
  }

  const auto dirs = rearrangement_directions(d, true);
  for (long sweep = 0; sweep < budget.max_sweeps; ++sweep) {
    st.sweeps = sweep + 1;
    const double start = cur.value;
    for (const auto& xi : dirs) {
      DescentResult r = descent_step(x, cur, xi, ev);
      if (r.changed && r.eval.value <= cur.value) {
        x = std::move(r.set);
        cur = std::move(r.eval);
        st.history.push_back({"sym " + xi.str(), cur.value});
      }
    }
    note_best();
    for (long b = 0; b < budget.exchange_batch && n >= 2; ++b) {
      ExchangeOutcome o = exchange_move(x, cur, ev, rng, budget.mode, temperature, budget.top_k);
      if (++proposals % 100 == 0) temperature *= 0.95;
      if (o.accepted) {
        x = std::move(o.set);
        cur = std::move(o.eval);
        st.history.push_back({"exchange", cur.value});
        note_best();
      }
    }
    if (ev.solves() >= budget.max_solves) {
      st.budget_exhausted = true;
      break;
    }
    if (budget.mode == AcceptMode::Greedy && start - cur.value <= budget.improve_tol * std::abs(start)) {
      st.converged = true;
      break;
    }
  }
  if (budget.mode == AcceptMode::Anneal) st.converged = !st.budget_exhausted;

  // final coordinate passes until every axis is convex
  x = st.best;
  cur = st.best_eval;
  for (long round = 0; round < budget.polish_rounds; ++round) {
    bool all = true, moved = false;
    for (int j = 0; j < d; ++j) {
      if (is_direction_convex(x, j)) continue;
      all = false;
      DescentResult r = descent_step(x, cur, Direction::coordinate(d, j), ev);
      if (r.changed && r.eval.value <= cur.value) {
        x = std::move(r.set);
        cur = std::move(r.eval);
        st.history.push_back({"polish e" + std::to_string(j + 1), cur.value});
        moved = true;
      }
    }
    if (all || !moved) break;
  }
  st.best = x;
  st.best_value = cur.value;
  st.best_eval = cur;
  st.current = x;
  st.current_value = cur.value;
  st.solves = ev.solves();
  return st;
}

AuditReport structural_audit(const LatticeSet& x, const Objective& objective) {
  AuditReport a;
  const int d = x.dim();
  a.n = static_cast<long>(x.size());
  a.scaled_perimeter = scaled_perimeter(x);
  a.reference_perimeter = scaled_perimeter(quasi_ball(d, a.n));
  a.diameter = diameter(x);
  a.diameter_ratio = a.diameter / std::pow(static_cast<double>(a.n), 1.0 / d);
  a.all_convex = true;
  for (int j = 0; j < d; ++j) {
    a.convex.push_back(is_direction_convex(x, j));
    a.all_convex = a.all_convex && a.convex.back();
  }
  ObjectiveEvaluator ev(objective);
  if (ev.feasible(x)) {
    const Evaluation e = ev.evaluate(x);
    const bool eigen = objective.kind == ObjectiveKind::Eigen;
    const double level = eigen ? 0.5 * e.potential.max_value() : 0.5;
    std::vector<int> axes(static_cast<std::size_t>(d));
    std::iota(axes.begin(), axes.end(), 0);
    const LatticePoint c = rounded_barycenter(x);
    for (int j = 0; j < d; ++j) a.walled_in.push_back(walled_in_check(e.potential, level, j, c, axes).holds);
    a.level_set_matches = eigen ? level_set(e.potential, 0.0, true) == x : level_set(e.potential, 1.0, false) == x;
  }
  a.perimeter_ok = a.scaled_perimeter <= 2.0 * a.reference_perimeter;
  a.diameter_ok = a.diameter_ratio <= 3.0;
  return a;
}

}  // namespace isocap
