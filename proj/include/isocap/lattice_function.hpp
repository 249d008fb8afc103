#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "isocap/lattice.hpp"

namespace isocap {

/// Finitely supported real function on Z^d stored densely over a box; reads outside the box give 0.
class LatticeFunction {
 public:
  explicit LatticeFunction(int dim = 0);
  explicit LatticeFunction(const Box& box, double fill = 0.0);

  static LatticeFunction indicator(const LatticeSet& x);

  int dim() const { return dim_; }
  const Box& box() const { return box_; }

  double operator()(const LatticePoint& i) const { return box_.contains(i) ? values_[box_.index(i)] : 0.0; }
  /// Grows the storage box when i falls outside it. Non-finite values throw.
  void set(const LatticePoint& i, double v);

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Smallest box holding every entry with |u| > 0.
  Box support_box() const;
  std::size_t support_size() const;
  LatticeSet support() const;

  /// Same function stored on `box`; entries outside it are dropped.
  LatticeFunction reboxed(const Box& box) const;
  LatticeFunction trimmed() const { return reboxed(support_box()); }

  double max_value() const;
  double min_value() const;

  /// Pointwise equality as functions on Z^d (storage boxes may differ).
  bool equals(const LatticeFunction& o, double tol = 0.0) const;

  LatticeFunction operator*(double s) const;
  friend LatticeFunction combine(double a, const LatticeFunction& u, double b, const LatticeFunction& v);

 private:
  int dim_;
  Box box_;
  std::vector<double> values_;
};

/// a u + b v
LatticeFunction combine(double a, const LatticeFunction& u, double b, const LatticeFunction& v);

/// Finitely supported sequence on Z: values[k] sits at offset + k.
struct Sequence {
  long offset = 0;
  std::vector<double> values;

  double operator()(long t) const {
    const long k = t - offset;
    return (k >= 0 && k < static_cast<long>(values.size())) ? values[static_cast<std::size_t>(k)] : 0.0;
  }
  long begin_index() const { return offset; }
  long end_index() const { return offset + static_cast<long>(values.size()); }

  static Sequence from(long offset, std::vector<double> values) { return Sequence{offset, std::move(values)}; }
  /// Drops leading/trailing zeros.
  Sequence trimmed() const;
  bool same_as(const Sequence& o) const;
};

/// t -> u(base + t xi)
Sequence slice_function(const LatticeFunction& u, const SliceIndex& s, const Direction& xi);

/// Text format: "d M" then M lines of d integers and a real value.
LatticeFunction read_function(std::istream& in);
LatticeFunction read_function_file(const std::string& path);
void write_function(std::ostream& out, const LatticeFunction& u);

}  // namespace isocap
