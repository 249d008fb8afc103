#include "isocap/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

#include "isocap/energy.hpp"

namespace isocap {

namespace {

// k-th slot of the order 0, 1, -1, 2, -2, ...
long slot(std::size_t k) {
  const long kk = static_cast<long>(k);
  return (kk % 2) ? (kk + 1) / 2 : -kk / 2;
}

std::vector<double> sorted_nonzero(const std::vector<double>& vals) {
  std::vector<double> out;
  out.reserve(vals.size());
  for (double v : vals) {
    if (v < 0.0) throw std::invalid_argument("symmetrization requires non-negative values");
    if (v != 0.0) out.push_back(v);
  }
  std::stable_sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Sequence place(const std::vector<double>& desc, int orientation) {
  if (desc.empty()) return Sequence{};
  const long n = static_cast<long>(desc.size());
  // slots used: [-(n-1)/2, n/2] for orientation +1
  const long lo = orientation > 0 ? -((n - 1) / 2) : -(n / 2);
  Sequence s;
  s.offset = lo;
  s.values.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < desc.size(); ++k) s.values[static_cast<std::size_t>(orientation * slot(k) - lo)] = desc[k];
  return s;
}

}  // namespace

Sequence symmetrize_1d(const Sequence& w) { return place(sorted_nonzero(w.values), +1); }

Sequence symmetrize_1d_reflected(const Sequence& w) { return place(sorted_nonzero(w.values), -1); }

Sequence reflect(const Sequence& w) {
  Sequence r;
  r.offset = -(w.end_index() - 1);
  r.values.assign(w.values.rbegin(), w.values.rend());
  return r;
}

Sequence flip(const Sequence& w, long l, long m) {
  if (l >= m) throw std::invalid_argument("flip window needs l < m");
  const long lo = w.values.empty() ? l : std::min(l, w.begin_index());
  const long hi = w.values.empty() ? m + 1 : std::max(m + 1, w.end_index());
  Sequence out;
  out.offset = lo;
  out.values.resize(static_cast<std::size_t>(hi - lo));
  for (long i = lo; i < hi; ++i) out.values[static_cast<std::size_t>(i - lo)] = (i >= l && i <= m) ? w(m + l - i) : w(i);
  return out;
}

LatticeFunction symmetrize_direction(const LatticeFunction& u, const Direction& xi) {
  if (xi.dim() != u.dim()) throw std::invalid_argument("direction dimension does not match function");
  const Box& box = u.box();
  const auto& vals = u.values();
  std::map<SliceIndex, std::vector<std::pair<long, double>>> slices;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const double v = vals[k];
    if (v < 0.0) throw std::invalid_argument("symmetrization requires non-negative values");
    if (v == 0.0) continue;
    long t = 0;
    const SliceIndex s = slice_of(box.point(k), xi, &t);
    slices[s].emplace_back(t, v);
  }
  std::vector<std::pair<LatticePoint, double>> placed;
  placed.reserve(u.support_size());
  for (auto& [s, entries] : slices) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> desc;
    desc.reserve(entries.size());
    for (const auto& e : entries) desc.push_back(e.second);
    std::stable_sort(desc.begin(), desc.end(), std::greater<>());
    const int orientation = s.offset_class == 0 ? +1 : -1;
    for (std::size_t k = 0; k < desc.size(); ++k)
      placed.emplace_back(s.base + xi.vector() * static_cast<int>(orientation * slot(k)), desc[k]);
  }
  if (placed.empty()) return LatticeFunction(u.dim());
  LatticePoint lo = placed.front().first, hi = lo;
  for (const auto& [p, v] : placed)
    for (int a = 0; a < u.dim(); ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  LatticeFunction out(Box(lo, hi));
  for (const auto& [p, v] : placed) out.values()[out.box().index(p)] = v;
  return out;
}

RearrangementPlan RearrangementPlan::full(int dim, bool dedupe) {
  return RearrangementPlan{rearrangement_directions(dim, dedupe), dedupe};
}

LatticeFunction iterate_symmetrize(const LatticeFunction& u, const RearrangementPlan& plan, double p,
                                   std::vector<double>* energies) {
  LatticeFunction cur = u;
  if (energies) energies->assign(1, energy_p(cur, p));
  for (const auto& xi : plan.directions) {
    cur = symmetrize_direction(cur, xi);
    if (energies) energies->push_back(energy_p(cur, p));
  }
  return cur;
}

PnReport check_Pn(const LatticeFunction& u, int n, double p, const PnOptions& opts) {
  if (n < 1) throw std::invalid_argument("check_Pn needs n >= 1");
  if (static_cast<std::size_t>(n) > opts.max_n) throw std::invalid_argument("check_Pn: n exceeds the configured cap");
  const auto dirs = rearrangement_directions(u.dim());
  PnReport rep;
  rep.n = n;
  rep.energy_before = energy_p(u, p);
  rep.energy_after = rep.energy_before;
  const double tol = opts.tol * std::max(1.0, rep.energy_before);
  double worst_drop = -1.0;

  auto record = [&](const LatticeFunction& f, const std::vector<Direction>& seq) {
    ++rep.sequences_tested;
    const double e = energy_p(f, p);
    const double drop = rep.energy_before - e;
    if (drop > worst_drop) {
      worst_drop = drop;
      rep.energy_after = e;
      rep.worst_sequence = seq;
    }
    if (drop > tol) rep.preserved = false;
  };

  double total = 1.0;
  for (int k = 0; k < n; ++k) total *= static_cast<double>(dirs.size());

  if (total <= static_cast<double>(opts.budget)) {
    std::vector<Direction> seq;
    std::function<void(const LatticeFunction&, int)> dfs = [&](const LatticeFunction& f, int depth) {
      if (depth == n) {
        record(f, seq);
        return;
      }
      for (const auto& xi : dirs) {
        seq.push_back(xi);
        dfs(symmetrize_direction(f, xi), depth + 1);
        seq.pop_back();
      }
    };
    dfs(u, 0);
  } else {
    rep.sampled = true;
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, dirs.size() - 1);
    for (std::size_t s = 0; s < opts.budget; ++s) {
      std::vector<Direction> seq;
      LatticeFunction f = u;
      for (int k = 0; k < n; ++k) {
        seq.push_back(dirs[pick(rng)]);
        f = symmetrize_direction(f, seq.back());
      }
      record(f, seq);
    }
  }
  if (rep.preserved && worst_drop <= 0.0) rep.worst_sequence.reset();
  return rep;
}

LatticeSet level_set(const LatticeFunction& u, double t, bool strict) {
  std::vector<LatticePoint> pts;
  const auto& vals = u.values();
  for (std::size_t k = 0; k < vals.size(); ++k)
    if (strict ? vals[k] > t : vals[k] >= t) pts.push_back(u.box().point(k));
  if (strict ? t < 0.0 : t <= 0.0)
    throw std::invalid_argument("level_set: threshold admits the infinite zero region");
  return LatticeSet(u.dim(), std::move(pts));
}

WalledInResult walled_in_check(const LatticeFunction& u, double t, int j, const LatticePoint& x0,
                               const std::vector<int>& axes) {
  const int d = u.dim();
  if (j < 0 || j >= d) throw std::invalid_argument("walled_in_check: axis out of range");
  if (std::find(axes.begin(), axes.end(), j) == axes.end())
    throw std::invalid_argument("walled_in_check: axes must contain j");
  WalledInResult res;
  LatticePoint base0 = x0;
  base0[j] = 0;
  const Box& box = u.box();
  if (box.volume() == 0) {
    res.holds = true;
    res.alpha = base0;
    return res;
  }
  const Direction ej = Direction::coordinate(d, j);
  // enumerate slice bases of the sublattice that meet the storage box
  LatticePoint lo = base0, hi = base0;
  for (int a : axes) {
    if (a == j) continue;
    lo[a] = box.lo[a];
    hi[a] = box.hi()[a];
  }
  for (int a = 0; a < d; ++a) {
    if (a == j || std::find(axes.begin(), axes.end(), a) != axes.end()) continue;
    if (base0[a] < box.lo[a] || base0[a] > box.hi()[a]) {
      res.holds = true;
      res.alpha = base0;
      return res;
    }
  }
  const Box bases(lo, hi);
  std::vector<std::pair<LatticePoint, std::vector<long>>> levels;
  for (std::size_t k = 0; k < bases.volume(); ++k) {
    const LatticePoint a = bases.point(k);
    const Sequence s = slice_function(u, SliceIndex{a, 0}, ej);
    std::vector<long> ts;
    for (long tt = s.begin_index(); tt < s.end_index(); ++tt)
      if (s(tt) >= t) ts.push_back(tt);
    levels.emplace_back(a, std::move(ts));
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < levels.size(); ++k)
    if (levels[k].second.size() > levels[best].second.size()) best = k;
  const auto& big = levels[best].second;
  for (const auto& [a, ts] : levels)
    if (!std::includes(big.begin(), big.end(), ts.begin(), ts.end())) return res;
  res.holds = true;
  res.alpha = levels[best].first;
  return res;
}

}  // namespace isocap
