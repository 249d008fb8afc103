#include "isocap/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace isocap {

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

}  // namespace

// ---------------------------------------------------------------------------
// LatticePoint

LatticePoint::LatticePoint(int dim) : dim_(dim) { check_dim(dim); }

LatticePoint::LatticePoint(std::initializer_list<int> coords)
    : LatticePoint(std::span<const int>(coords.begin(), coords.size())) {}

LatticePoint::LatticePoint(std::span<const int> coords) : dim_(static_cast<int>(coords.size())) {
  check_dim(dim_);
  std::copy(coords.begin(), coords.end(), c_.begin());
}

LatticePoint& LatticePoint::operator+=(const LatticePoint& o) {
  for (int k = 0; k < dim_; ++k) c_[k] += o.c_[k];
  return *this;
}

LatticePoint& LatticePoint::operator-=(const LatticePoint& o) {
  for (int k = 0; k < dim_; ++k) c_[k] -= o.c_[k];
  return *this;
}

LatticePoint LatticePoint::operator*(int s) const {
  LatticePoint r = *this;
  for (int k = 0; k < dim_; ++k) r.c_[k] *= s;
  return r;
}

LatticePoint LatticePoint::shifted(int axis, int amount) const {
  LatticePoint r = *this;
  r.c_[axis] += amount;
  return r;
}

long LatticePoint::dot(const LatticePoint& o) const {
  long s = 0;
  for (int k = 0; k < dim_; ++k) s += static_cast<long>(c_[k]) * o.c_[k];
  return s;
}

double LatticePoint::norm() const { return std::sqrt(static_cast<double>(norm2())); }

std::strong_ordering LatticePoint::operator<=>(const LatticePoint& o) const {
  if (auto c = dim_ <=> o.dim_; c != 0) return c;
  for (int k = 0; k < dim_; ++k)
    if (auto c = c_[k] <=> o.c_[k]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::string LatticePoint::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const LatticePoint& p) {
  os << '(';
  for (int k = 0; k < p.dim(); ++k) os << (k ? "," : "") << p[k];
  return os << ')';
}

std::size_t LatticePointHash::operator()(const LatticePoint& p) const noexcept {
  std::size_t h = static_cast<std::size_t>(p.dim());
  for (int k = 0; k < p.dim(); ++k)
    h = h * 0x9E3779B97F4A7C15ull + static_cast<std::size_t>(static_cast<std::uint32_t>(p[k]));
  return h ^ (h >> 29);
}

double distance(const LatticePoint& a, const LatticePoint& b) { return (a - b).norm(); }

std::vector<LatticePoint> neighbors(const LatticePoint& i) {
  std::vector<LatticePoint> out;
  out.reserve(2 * i.dim());
  for (int k = 0; k < i.dim(); ++k) {
    out.push_back(i.shifted(k, -1));
    out.push_back(i.shifted(k, +1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Box

Box::Box(LatticePoint lower, LatticePoint upper_inclusive) : lo(lower) {
  if (lower.dim() != upper_inclusive.dim()) throw std::invalid_argument("box corner dimensions differ");
  for (int k = 0; k < lower.dim(); ++k) extent[k] = std::max(0, upper_inclusive[k] - lower[k] + 1);
}

std::size_t Box::volume() const {
  if (lo.dim() == 0) return 0;
  std::size_t v = 1;
  for (int k = 0; k < lo.dim(); ++k) v *= static_cast<std::size_t>(extent[k]);
  return v;
}

bool Box::contains(const LatticePoint& p) const {
  for (int k = 0; k < lo.dim(); ++k)
    if (p[k] < lo[k] || p[k] >= lo[k] + extent[k]) return false;
  return lo.dim() > 0;
}

LatticePoint Box::hi() const {
  LatticePoint h = lo;
  for (int k = 0; k < lo.dim(); ++k) h[k] = lo[k] + extent[k] - 1;
  return h;
}

std::size_t Box::index(const LatticePoint& p) const {
  // Last axis varies slowest so that the flat order is lexicographic in reverse axis order;
  // first axis is the contiguous one.
  std::size_t idx = 0;
  for (int k = lo.dim() - 1; k >= 0; --k) idx = idx * extent[k] + static_cast<std::size_t>(p[k] - lo[k]);
  return idx;
}

LatticePoint Box::point(std::size_t index) const {
  LatticePoint p = lo;
  for (int k = 0; k < lo.dim(); ++k) {
    p[k] = lo[k] + static_cast<int>(index % extent[k]);
    index /= extent[k];
  }
  return p;
}

Box Box::grown(int margin) const {
  Box b = *this;
  for (int k = 0; k < lo.dim(); ++k) {
    b.lo[k] -= margin;
    b.extent[k] += 2 * margin;
  }
  return b;
}

Box Box::united(const Box& o) const {
  if (empty()) return o;
  if (o.empty()) return *this;
  LatticePoint l = lo, h = hi(), oh = o.hi();
  for (int k = 0; k < lo.dim(); ++k) {
    l[k] = std::min(lo[k], o.lo[k]);
    h[k] = std::max(h[k], oh[k]);
  }
  return Box(l, h);
}

// ---------------------------------------------------------------------------
// Directions and slices

Direction Direction::coordinate(int dim, int axis) {
  if (axis < 0 || axis >= dim) throw std::invalid_argument("coordinate axis out of range");
  LatticePoint v(dim);
  v[axis] = 1;
  return Direction(Kind::Coordinate, v, axis, -1, 1);
}

Direction Direction::diagonal(int dim, int axis, int other, int sign) {
  if (axis < 0 || axis >= dim || other < 0 || other >= dim || axis == other)
    throw std::invalid_argument("diagonal direction needs two distinct axes in range");
  if (sign != 1 && sign != -1) throw std::invalid_argument("diagonal sign must be +1 or -1");
  LatticePoint v(dim);
  v[axis] = 1;
  v[other] = sign;
  return Direction(Kind::Diagonal, v, axis, other, sign);
}

std::string Direction::str() const {
  std::string s = "e" + std::to_string(lead_ + 1);
  if (kind_ == Kind::Diagonal) s += (sign_ > 0 ? "+e" : "-e") + std::to_string(other_ + 1);
  return s;
}

std::vector<Direction> rearrangement_directions(int dim, bool dedupe) {
  std::vector<Direction> out;
  for (int i = 0; i < dim; ++i) out.push_back(Direction::coordinate(dim, i));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) out.push_back(Direction::diagonal(dim, i, j, +1));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      if (i == j) continue;
      if (dedupe && j < i) continue;
      out.push_back(Direction::diagonal(dim, i, j, -1));
    }
  return out;
}

SliceIndex slice_of(const LatticePoint& i, const Direction& xi, long* t_out) {
  SliceIndex s;
  long t = 0;
  if (xi.is_coordinate()) {
    t = i[xi.lead_axis()];
    s.base = i;
    s.base[xi.lead_axis()] = 0;
    s.offset_class = 0;
  } else {
    const long proj = xi.vector().dot(i);
    t = floor_div(proj, 2);
    s.offset_class = static_cast<int>(proj - 2 * t);
    s.base = i - xi.vector() * static_cast<int>(t);
  }
  if (t_out) *t_out = t;
  return s;
}

// ---------------------------------------------------------------------------
// LatticeSet

LatticeSet::LatticeSet(int dim, std::vector<LatticePoint> points) : dim_(dim), points_(std::move(points)) {
  check_dim(dim);
  for (const auto& p : points_)
    if (p.dim() != dim) throw std::invalid_argument("point " + p.str() + " has wrong dimension");
  std::sort(points_.begin(), points_.end());
  if (std::adjacent_find(points_.begin(), points_.end()) != points_.end())
    throw std::invalid_argument("duplicate point in lattice set");
  index_.reserve(points_.size() * 2);
  index_.insert(points_.begin(), points_.end());
}

Box LatticeSet::bounding_box() const {
  if (points_.empty()) return Box{};
  LatticePoint l = points_.front(), h = points_.front();
  for (const auto& p : points_)
    for (int k = 0; k < dim_; ++k) {
      l[k] = std::min(l[k], p[k]);
      h[k] = std::max(h[k], p[k]);
    }
  return Box(l, h);
}

LatticeSet LatticeSet::translated(const LatticePoint& shift) const {
  std::vector<LatticePoint> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back(p + shift);
  return LatticeSet(dim_, std::move(pts));
}

long perimeter(const LatticeSet& x) {
  if (x.empty()) throw std::invalid_argument("perimeter of an empty set");
  long count = 0;
  for (const auto& p : x)
    for (int k = 0; k < x.dim(); ++k) {
      if (!x.contains(p.shifted(k, -1))) ++count;
      if (!x.contains(p.shifted(k, +1))) ++count;
    }
  return count;
}

double scaled_perimeter(const LatticeSet& x) {
  const double n = static_cast<double>(x.size());
  const int d = x.dim();
  return std::pow(n, (1.0 - d) / d) * static_cast<double>(perimeter(x));
}

double diameter(const LatticeSet& x, DiameterMetric metric) {
  double best = 0.0;
  const auto& pts = x.points();
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      if (metric == DiameterMetric::Euclidean) {
        best = std::max(best, static_cast<double>((pts[a] - pts[b]).norm2()));
      } else {
        for (int k = 0; k < x.dim(); ++k) best = std::max(best, std::abs(double(pts[a][k] - pts[b][k])));
      }
    }
  return metric == DiameterMetric::Euclidean ? std::sqrt(best) : best;
}

bool is_direction_convex(const LatticeSet& x, int axis) {
  if (axis < 0 || axis >= x.dim()) throw std::invalid_argument("axis out of range");
  // points are sorted lexicographically; collect the coordinate along `axis` per line.
  std::map<LatticePoint, std::vector<int>> lines;
  for (const auto& p : x) {
    LatticePoint base = p;
    base[axis] = 0;
    lines[base].push_back(p[axis]);
  }
  for (auto& [base, ts] : lines) {
    std::sort(ts.begin(), ts.end());
    if (ts.back() - ts.front() + 1 != static_cast<int>(ts.size())) return false;
  }
  return true;
}

LatticeSet lattice_ball(double r, const LatticePoint& center) {
  if (!(r > 0)) throw std::invalid_argument("ball radius must be positive");
  const int d = center.dim();
  const int m = static_cast<int>(std::floor(r));
  const double r2 = r * r;
  std::vector<LatticePoint> pts;
  LatticePoint lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = -m;
    hi[k] = m;
  }
  const Box box(lo, hi);
  for (std::size_t idx = 0; idx < box.volume(); ++idx) {
    LatticePoint off = box.point(idx);
    // integer comparison up to rounding of r^2
    if (static_cast<double>(off.norm2()) <= r2 * (1 + 1e-14)) pts.push_back(center + off);
  }
  return LatticeSet(d, std::move(pts));
}

std::size_t sym_diff_count(const LatticeSet& x, const LatticeSet& y) {
  if (x.dim() != y.dim() && !x.empty() && !y.empty())
    throw std::invalid_argument("symmetric difference of sets with different dimensions");
  std::size_t common = 0;
  const LatticeSet& small = x.size() <= y.size() ? x : y;
  const LatticeSet& large = x.size() <= y.size() ? y : x;
  for (const auto& p : small)
    if (large.contains(p)) ++common;
  return x.size() + y.size() - 2 * common;
}

LatticePoint rounded_barycenter(const LatticeSet& x) {
  if (x.empty()) throw std::invalid_argument("barycenter of an empty set");
  std::array<double, kMaxDim> sum{};
  for (const auto& p : x)
    for (int k = 0; k < x.dim(); ++k) sum[k] += p[k];
  LatticePoint c(x.dim());
  for (int k = 0; k < x.dim(); ++k) c[k] = static_cast<int>(std::lround(sum[k] / static_cast<double>(x.size())));
  return c;
}

BallMatch min_sym_diff_to_ball(const LatticeSet& x, double r) {
  if (x.empty()) throw std::invalid_argument("min_sym_diff_to_ball needs a nonempty set");
  const int d = x.dim();
  const LatticePoint origin(d);
  const std::size_t ball_count = lattice_ball(r, origin).size();
  const LatticePoint c = rounded_barycenter(x);
  const double window = diameter(x) + r;
  const int m = static_cast<int>(std::ceil(window));
  const double r2 = r * r * (1 + 1e-14);
  const double w2 = window * window * (1 + 1e-14);

  LatticePoint lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = -m;
    hi[k] = m;
  }
  const Box offsets(lo, hi);
  BallMatch best{c, x.size() + ball_count};
  bool have = false;
  for (std::size_t idx = 0; idx < offsets.volume(); ++idx) {
    const LatticePoint off = offsets.point(idx);
    if (static_cast<double>(off.norm2()) > w2) continue;
    const LatticePoint z = c + off;
    std::size_t inside = 0;
    for (const auto& p : x)
      if (static_cast<double>((p - z).norm2()) <= r2) ++inside;
    const std::size_t count = x.size() + ball_count - 2 * inside;
    if (!have || count < best.count || (count == best.count && z < best.center)) {
      best = {z, count};
      have = true;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// IO

LatticeSet read_set(std::istream& in) {
  long d = 0, n = 0;
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      auto pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos || out[pos] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line(line)) throw ParseError("set file: missing header");
  {
    std::istringstream hs(line);
    if (!(hs >> d >> n) || d < 1 || d > kMaxDim || n < 0) throw ParseError("set file: bad header '" + line + "'");
    std::string extra;
    if (hs >> extra) throw ParseError("set file: trailing data in header");
  }
  std::vector<LatticePoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  while (next_line(line)) {
    std::istringstream ls(line);
    LatticePoint p(static_cast<int>(d));
    for (int k = 0; k < d; ++k) {
      long v;
      if (!(ls >> v) || v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ParseError("set file: bad coordinates in '" + line + "'");
      p[k] = static_cast<int>(v);
    }
    std::string extra;
    if (ls >> extra) throw ParseError("set file: expected " + std::to_string(d) + " coordinates in '" + line + "'");
    pts.push_back(p);
  }
  if (static_cast<long>(pts.size()) != n)
    throw ParseError("set file: header says " + std::to_string(n) + " points, found " + std::to_string(pts.size()));
  try {
    return LatticeSet(static_cast<int>(d), std::move(pts));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("set file: ") + e.what());
  }
}

LatticeSet read_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open set file " + path);
  return read_set(in);
}

void write_set(std::ostream& out, const LatticeSet& x) {
  out << x.dim() << ' ' << x.size() << '\n';
  for (const auto& p : x) {
    for (int k = 0; k < x.dim(); ++k) out << (k ? " " : "") << p[k];
    out << '\n';
  }
}

}  // namespace isocap
