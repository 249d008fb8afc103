#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace isocap {

inline constexpr int kMaxDim = 8;

/// Point of Z^d. Coordinates past `dim()` are always zero.
class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(int dim);
  LatticePoint(std::initializer_list<int> coords);
  explicit LatticePoint(std::span<const int> coords);

  int dim() const { return dim_; }
  int operator[](int k) const { return c_[k]; }
  int& operator[](int k) { return c_[k]; }

  LatticePoint& operator+=(const LatticePoint& o);
  LatticePoint& operator-=(const LatticePoint& o);
  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) { return a += b; }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) { return a -= b; }
  LatticePoint operator*(int s) const;
  LatticePoint shifted(int axis, int amount) const;

  long dot(const LatticePoint& o) const;
  long norm2() const { return dot(*this); }
  double norm() const;

  bool operator==(const LatticePoint& o) const = default;
  std::strong_ordering operator<=>(const LatticePoint& o) const;

  std::string str() const;

 private:
  std::array<int, kMaxDim> c_{};
  int dim_ = 0;
};

std::ostream& operator<<(std::ostream& os, const LatticePoint& p);

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept;
};

double distance(const LatticePoint& a, const LatticePoint& b);

/// The 2d nearest neighbours of `i`, ordered (-e_1, +e_1, -e_2, +e_2, ...).
std::vector<LatticePoint> neighbors(const LatticePoint& i);

/// Axis-aligned integer box [lo, lo + extent).
struct Box {
  LatticePoint lo;
  std::array<int, kMaxDim> extent{};

  Box() = default;
  Box(LatticePoint lower, LatticePoint upper_inclusive);

  int dim() const { return lo.dim(); }
  std::size_t volume() const;
  bool empty() const { return volume() == 0; }
  bool contains(const LatticePoint& p) const;
  LatticePoint hi() const;  // inclusive upper corner
  std::size_t index(const LatticePoint& p) const;
  LatticePoint point(std::size_t index) const;
  Box grown(int margin) const;
  Box united(const Box& o) const;
};

/// Rearrangement direction: e_j, or e_j + sign * e_l with j != l.
class Direction {
 public:
  enum class Kind { Coordinate, Diagonal };

  static Direction coordinate(int dim, int axis);
  static Direction diagonal(int dim, int axis, int other, int sign);

  Kind kind() const { return kind_; }
  bool is_coordinate() const { return kind_ == Kind::Coordinate; }
  int dim() const { return vec_.dim(); }
  const LatticePoint& vector() const { return vec_; }
  /// An axis carrying a +1 entry. For e_j + e_l this is the first listed axis.
  int lead_axis() const { return lead_; }
  /// The other axis of a diagonal, -1 for coordinate directions.
  int other_axis() const { return other_; }
  int sign() const { return sign_; }

  bool operator==(const Direction& o) const { return vec_ == o.vec_; }
  std::string str() const;

 private:
  Direction(Kind kind, LatticePoint vec, int lead, int other, int sign)
      : kind_(kind), vec_(vec), lead_(lead), other_(other), sign_(sign) {}
  Kind kind_ = Kind::Coordinate;
  LatticePoint vec_;
  int lead_ = 0;
  int other_ = -1;
  int sign_ = 1;
};

/// The rearrangement set: every e_i, every e_i + e_j, and both e_i - e_j and e_j - e_i.
/// With `dedupe`, e_j - e_i is dropped in favour of e_i - e_j (same slice family).
std::vector<Direction> rearrangement_directions(int dim, bool dedupe = false);

/// Slice base alpha with xi . alpha in {0, 1}; the line is alpha + t xi.
struct SliceIndex {
  LatticePoint base;
  int offset_class = 0;

  bool operator==(const SliceIndex& o) const = default;
  auto operator<=>(const SliceIndex& o) const = default;
};

/// Decomposes i = base + t * xi with xi . base in {0, 1} (in {0} for coordinate xi).
SliceIndex slice_of(const LatticePoint& i, const Direction& xi, long* t_out = nullptr);

class LatticeSet {
 public:
  explicit LatticeSet(int dim = 0) : dim_(dim) {}
  /// Throws std::invalid_argument on duplicates or mixed dimensions.
  LatticeSet(int dim, std::vector<LatticePoint> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  bool contains(const LatticePoint& p) const { return index_.count(p) != 0; }

  /// Lexicographically sorted.
  const std::vector<LatticePoint>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  Box bounding_box() const;
  LatticeSet translated(const LatticePoint& shift) const;

  bool operator==(const LatticeSet& o) const { return dim_ == o.dim_ && points_ == o.points_; }

 private:
  int dim_;
  std::vector<LatticePoint> points_;
  std::unordered_set<LatticePoint, LatticePointHash> index_;
};

/// P(X): number of (i, j) with i in X, j outside, |i - j| = 1.
long perimeter(const LatticeSet& x);
/// P_N(X) = N^{(1-d)/d} P(X).
double scaled_perimeter(const LatticeSet& x);

enum class DiameterMetric { Euclidean, LInfinity };
double diameter(const LatticeSet& x, DiameterMetric metric = DiameterMetric::Euclidean);

bool is_direction_convex(const LatticeSet& x, int axis);

/// Closed ball {i : |i - z| <= r} intersected with Z^d.
LatticeSet lattice_ball(double r, const LatticePoint& center);

std::size_t sym_diff_count(const LatticeSet& x, const LatticeSet& y);

struct BallMatch {
  LatticePoint center;
  std::size_t count = 0;
};

/// Minimizes #(X delta (z + B_r)) over integer centers z within diameter(X) + r of the
/// rounded barycenter. Ties go to the lexicographically smallest z.
BallMatch min_sym_diff_to_ball(const LatticeSet& x, double r);

LatticePoint rounded_barycenter(const LatticeSet& x);

/// Text format: "d N" then N lines of d integers.
LatticeSet read_set(std::istream& in);
LatticeSet read_set_file(const std::string& path);
void write_set(std::ostream& out, const LatticeSet& x);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isocap
