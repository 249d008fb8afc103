#include "isocap/lattice_function.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace isocap {

namespace {

Box empty_box(int dim) {
  Box b;
  b.lo = LatticePoint(dim);
  return b;
}

}  // namespace

LatticeFunction::LatticeFunction(int dim) : dim_(dim) {
  if (dim > 0) box_ = empty_box(dim);
}

LatticeFunction::LatticeFunction(const Box& box, double fill)
    : dim_(box.dim()), box_(box), values_(box.volume(), fill) {}

LatticeFunction LatticeFunction::indicator(const LatticeSet& x) {
  if (x.empty()) return LatticeFunction(x.dim());
  LatticeFunction u(x.bounding_box());
  for (const auto& p : x) u.values_[u.box_.index(p)] = 1.0;
  return u;
}

void LatticeFunction::set(const LatticePoint& i, double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("lattice function values must be finite");
  if (i.dim() != dim_) throw std::invalid_argument("point dimension does not match function");
  if (!box_.contains(i)) {
    if (v == 0.0) return;
    Box grown = box_.united(Box(i, i));
    *this = reboxed(grown);
  }
  values_[box_.index(i)] = v;
}

Box LatticeFunction::support_box() const {
  Box out = empty_box(dim_);
  bool any = false;
  LatticePoint lo(dim_), hi(dim_);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k] == 0.0) continue;
    const LatticePoint p = box_.point(k);
    if (!any) {
      lo = hi = p;
      any = true;
    } else {
      for (int a = 0; a < dim_; ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    }
  }
  return any ? Box(lo, hi) : out;
}

std::size_t LatticeFunction::support_size() const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

LatticeSet LatticeFunction::support() const {
  std::vector<LatticePoint> pts;
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (values_[k] != 0.0) pts.push_back(box_.point(k));
  return LatticeSet(dim_, std::move(pts));
}

LatticeFunction LatticeFunction::reboxed(const Box& box) const {
  if (box.volume() == 0) return LatticeFunction(dim_);
  LatticeFunction out(box);
  if (values_.empty()) return out;
  // walk the overlap only
  LatticePoint lo(dim_), hi(dim_);
  const LatticePoint bh = box.hi(), sh = box_.hi();
  for (int a = 0; a < dim_; ++a) {
    lo[a] = std::max(box.lo[a], box_.lo[a]);
    hi[a] = std::min(bh[a], sh[a]);
    if (lo[a] > hi[a]) return out;
  }
  const Box overlap(lo, hi);
  for (std::size_t k = 0; k < overlap.volume(); ++k) {
    const LatticePoint p = overlap.point(k);
    out.values_[box.index(p)] = values_[box_.index(p)];
  }
  return out;
}

double LatticeFunction::max_value() const {
  double m = 0.0;  // implicit zeros outside the box
  for (double v : values_) m = std::max(m, v);
  return m;
}

double LatticeFunction::min_value() const {
  double m = 0.0;
  for (double v : values_) m = std::min(m, v);
  return m;
}

bool LatticeFunction::equals(const LatticeFunction& o, double tol) const {
  if (dim_ != o.dim_) return false;
  const Box all = box_.united(o.box_);
  for (std::size_t k = 0; k < all.volume(); ++k) {
    const LatticePoint p = all.point(k);
    if (std::abs((*this)(p) - o(p)) > tol) return false;
  }
  return true;
}

LatticeFunction LatticeFunction::operator*(double s) const {
  LatticeFunction r = *this;
  for (double& v : r.values_) v *= s;
  return r;
}

LatticeFunction combine(double a, const LatticeFunction& u, double b, const LatticeFunction& v) {
  if (u.dim() != v.dim()) throw std::invalid_argument("combine: dimension mismatch");
  const Box all = u.box().united(v.box());
  LatticeFunction r(all);
  for (std::size_t k = 0; k < all.volume(); ++k) {
    const LatticePoint p = all.point(k);
    r.values_[k] = a * u(p) + b * v(p);
  }
  return r;
}

Sequence Sequence::trimmed() const {
  std::size_t first = 0, last = values.size();
  while (first < last && values[first] == 0.0) ++first;
  while (last > first && values[last - 1] == 0.0) --last;
  if (first == last) return Sequence{};
  return Sequence{offset + static_cast<long>(first), std::vector<double>(values.begin() + first, values.begin() + last)};
}

bool Sequence::same_as(const Sequence& o) const {
  const Sequence a = trimmed(), b = o.trimmed();
  return a.values == b.values && (a.values.empty() || a.offset == b.offset);
}

Sequence slice_function(const LatticeFunction& u, const SliceIndex& s, const Direction& xi) {
  const Box& box = u.box();
  if (box.volume() == 0) return Sequence{};
  const LatticePoint& v = xi.vector();
  const LatticePoint hi = box.hi();
  long tlo = std::numeric_limits<long>::min() / 4, thi = std::numeric_limits<long>::max() / 4;
  for (int a = 0; a < u.dim(); ++a) {
    if (v[a] == 0) {
      if (s.base[a] < box.lo[a] || s.base[a] > hi[a]) return Sequence{};
      continue;
    }
    // base_a + t v_a in [lo_a, hi_a], v_a = +-1
    long l = static_cast<long>(box.lo[a]) - s.base[a];
    long h = static_cast<long>(hi[a]) - s.base[a];
    if (v[a] < 0) {
      std::swap(l, h);
      l = -l;
      h = -h;
    }
    tlo = std::max(tlo, l);
    thi = std::min(thi, h);
  }
  if (tlo > thi) return Sequence{};
  Sequence seq;
  seq.offset = tlo;
  seq.values.reserve(static_cast<std::size_t>(thi - tlo + 1));
  LatticePoint p = s.base + v * static_cast<int>(tlo);
  for (long t = tlo; t <= thi; ++t, p += v) seq.values.push_back(u.values()[box.index(p)]);
  return seq;
}

LatticeFunction read_function(std::istream& in) {
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      auto pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos || out[pos] == '#') continue;
      return true;
    }
    return false;
  };
  long d = 0, m = 0;
  if (!next_line(line)) throw ParseError("function file: missing header");
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> d >> m) || d < 1 || d > kMaxDim || m < 0 || (hs >> extra))
      throw ParseError("function file: bad header '" + line + "'");
  }
  std::vector<std::pair<LatticePoint, double>> entries;
  while (next_line(line)) {
    std::istringstream ls(line);
    LatticePoint p(static_cast<int>(d));
    for (int k = 0; k < d; ++k) {
      long c;
      if (!(ls >> c) || c < std::numeric_limits<int>::min() || c > std::numeric_limits<int>::max())
        throw ParseError("function file: bad coordinates in '" + line + "'");
      p[k] = static_cast<int>(c);
    }
    double v;
    std::string extra;
    if (!(ls >> v) || !std::isfinite(v) || (ls >> extra)) throw ParseError("function file: bad value in '" + line + "'");
    entries.emplace_back(p, v);
  }
  if (static_cast<long>(entries.size()) != m)
    throw ParseError("function file: header says " + std::to_string(m) + " entries, found " +
                     std::to_string(entries.size()));
  if (entries.empty()) return LatticeFunction(static_cast<int>(d));
  LatticePoint lo = entries.front().first, hi = lo;
  for (const auto& [p, v] : entries)
    for (int a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  LatticeFunction u(Box(lo, hi));
  std::vector<char> seen(u.values().size(), 0);
  for (const auto& [p, v] : entries) {
    const std::size_t k = u.box().index(p);
    if (seen[k]) throw ParseError("function file: duplicate point " + p.str());
    seen[k] = 1;
    u.values()[k] = v;
  }
  return u;
}

LatticeFunction read_function_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open function file " + path);
  return read_function(in);
}

void write_function(std::ostream& out, const LatticeFunction& u) {
  const Box& b = u.box();
  const std::size_t m = u.support_size();
  out << u.dim() << ' ' << m << '\n';
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < u.values().size(); ++k) {
    const double v = u.values()[k];
    if (v == 0.0) continue;
    const LatticePoint p = b.point(k);
    for (int a = 0; a < u.dim(); ++a) out << p[a] << ' ';
    out << v << '\n';
  }
  out.precision(old);
}

}  // namespace isocap
