#include "isocap/energy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "isocap/numeric.hpp"

namespace isocap {

namespace {

void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("energy exponent p must be > 1");
}

}  // namespace

double edge_energy_p(const LatticeFunction& u, double p) {
  check_p(p);
  const Box& box = u.box();
  const std::size_t vol = box.volume();
  if (vol == 0) return 0.0;
  const auto& vals = u.values();
  NeumaierSum sum;
  std::size_t stride = 1;
  for (int k = 0; k < u.dim(); ++k) {
    const std::size_t ext = static_cast<std::size_t>(box.extent[k]);
    // each line along axis k: interior differences plus the two jumps to zero at the ends
    for (std::size_t idx = 0; idx < vol; ++idx) {
      const std::size_t pos = (idx / stride) % ext;
      const double here = vals[idx];
      if (pos == 0) sum.add(pow_abs(here, p));
      const double next = (pos + 1 < ext) ? vals[idx + stride] : 0.0;
      sum.add(pow_abs(next - here, p));
    }
    stride *= ext;
  }
  return sum.value();
}

double energy_p(const LatticeFunction& u, double p) { return 2.0 * edge_energy_p(u, p); }

double scale_factor(double p, int d, long n) {
  if (n < 1) throw std::invalid_argument("cardinality must be positive");
  return std::pow(static_cast<double>(n), (p - d) / d);
}

double energy_scaled(const LatticeFunction& u, double p, long n) {
  return scale_factor(p, u.dim(), n) * energy_p(u, p);
}

double energy_1d(const Sequence& w, double p) {
  check_p(p);
  if (w.values.empty()) return 0.0;
  NeumaierSum s;
  for (long t = w.begin_index() - 1; t < w.end_index(); ++t) s.add(pow_abs(w(t + 1) - w(t), p));
  return s.value();
}

double interaction_1d(const Sequence& w, const Sequence& v, double p) {
  check_p(p);
  if (w.values.empty() && v.values.empty()) return 0.0;
  long lo = std::min(w.values.empty() ? v.begin_index() : w.begin_index(),
                     v.values.empty() ? w.begin_index() : v.begin_index());
  long hi = std::max(w.end_index(), v.end_index());
  NeumaierSum s;
  for (long t = lo; t < hi; ++t) s.add(pow_abs(w(t) - v(t), p));
  return s.value();
}

double diag_1d(const Sequence& w, const Sequence& v, double p) {
  check_p(p);
  if (w.values.empty() && v.values.empty()) return 0.0;
  long lo = std::min(w.values.empty() ? v.begin_index() : w.begin_index(),
                     v.values.empty() ? w.begin_index() : v.begin_index()) - 1;
  long hi = std::max(w.end_index(), v.end_index()) + 1;
  NeumaierSum s;
  for (long t = lo; t < hi; ++t) {
    s.add(pow_abs(w(t) - v(t), p));
    s.add(pow_abs(w(t + 1) - v(t), p));
  }
  return s.value();
}

double EnergyBreakdown::recombined() const {
  NeumaierSum s;
  for (const auto& [k, v] : per_slice) s.add(v);
  for (const auto& [k, v] : cross_terms) s.add(v);
  return s.value();
}

EnergyBreakdown decompose_energy(const LatticeFunction& u, const Direction& xi, double p) {
  check_p(p);
  if (xi.dim() != u.dim()) throw std::invalid_argument("direction dimension does not match function");
  const int d = u.dim();
  EnergyBreakdown out;
  const Box& box = u.box();
  if (box.volume() == 0) return out;

  // every slice within L-infinity distance 1 of the support carries all non-zero terms
  const Box reach = box.grown(1);
  std::set<SliceIndex> bases;
  const int j = xi.lead_axis();
  for (std::size_t k = 0; k < reach.volume(); ++k) {
    SliceIndex s = slice_of(reach.point(k), xi);
    if (s.offset_class == 1) {
      s.base = s.base.shifted(j, -1);  // class-1 slices are indexed by their class-0 partner g + e_j
      s.offset_class = 0;
    }
    bases.insert(s);
  }

  auto slice = [&](const LatticePoint& base, int cls) { return slice_function(u, SliceIndex{base, cls}, xi); };

  if (xi.is_coordinate()) {
    for (const auto& s : bases) {
      const Sequence w = slice(s.base, 0);
      const double e = 2.0 * energy_1d(w, p);
      if (e != 0.0) out.per_slice[s] = e;
      for (int k = 0; k < d; ++k) {
        if (k == j) continue;
        const double c = 2.0 * interaction_1d(w, slice(s.base.shifted(k, 1), 0), p);
        if (c != 0.0) out.cross_terms[{s, k}] = c;
      }
    }
  } else {
    const int l = xi.other_axis();
    const int sgn = xi.sign();
    for (const auto& s : bases) {
      const Sequence w = slice(s.base, 0);
      const LatticePoint bj = s.base.shifted(j, 1);
      const Sequence wj = slice(bj, 1);
      const Sequence wl = slice(s.base.shifted(l, sgn), 1);
      const double e = 2.0 * (diag_1d(w, wj, p) + diag_1d(w, wl, p));
      if (e != 0.0) out.per_slice[s] = e;
      for (int k = 0; k < d; ++k) {
        if (k == j || k == l) continue;
        const double c = 2.0 * (interaction_1d(w, slice(s.base.shifted(k, 1), 0), p) +
                                interaction_1d(wj, slice(bj.shifted(k, 1), 1), p));
        if (c != 0.0) out.cross_terms[{s, k}] = c;
      }
    }
  }
  out.total = out.recombined();
  return out;
}

}  // namespace isocap
