#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "isocap/lattice_function.hpp"

namespace isocap {

/// Values sorted decreasingly (stable in t) and placed at 0, 1, -1, 2, -2, ...
/// Negative entries throw std::invalid_argument.
Sequence symmetrize_1d(const Sequence& w);
/// t -> w(-t)
Sequence reflect(const Sequence& w);
/// reflect(symmetrize_1d(w)): placement order 0, -1, 1, -2, 2, ...
Sequence symmetrize_1d_reflected(const Sequence& w);

/// Window reversal w_{l,m}(i) = w(m + l - i) on [l, m]. Requires l < m.
Sequence flip(const Sequence& w, long l, long m);

/// Coordinate directions rearrange every line. Diagonal directions split Z^d by the parity of
/// xi . i: class-0 slices take (u^a)*, class-1 slices take R (u^a)*.
LatticeFunction symmetrize_direction(const LatticeFunction& u, const Direction& xi);

struct RearrangementPlan {
  std::vector<Direction> directions;
  bool dedupe = false;

  static RearrangementPlan full(int dim, bool dedupe = false);
};

/// Left-to-right application. When `energies` is given it receives E_p after each step
/// (element 0 is the input energy).
LatticeFunction iterate_symmetrize(const LatticeFunction& u, const RearrangementPlan& plan, double p = 2.0,
                                   std::vector<double>* energies = nullptr);

struct PnReport {
  int n = 0;
  bool preserved = true;
  bool sampled = false;
  std::size_t sequences_tested = 0;
  std::optional<std::vector<Direction>> worst_sequence;
  double energy_before = 0.0;
  double energy_after = 0.0;  // at the worst sequence
};

struct PnOptions {
  double tol = 1e-12;               // relative to max(1, E_p(u))
  std::size_t budget = 100000;      // exhaustive when |B|^n fits, otherwise sampled
  std::uint64_t seed = 12345;
  std::size_t max_n = 6;
};

PnReport check_Pn(const LatticeFunction& u, int n, double p, const PnOptions& opts = {});

/// {u >= t} or {u > t}
LatticeSet level_set(const LatticeFunction& u, double t, bool strict);

struct WalledInResult {
  bool holds = false;
  std::optional<LatticePoint> alpha;  // dominating slice base (alpha_j = 0)
};

/// Within the sublattice x0 + span{e_a : a in axes}, looks for an e_j-line whose level set
/// {u >= t} contains the level sets of every parallel line of that sublattice.
WalledInResult walled_in_check(const LatticeFunction& u, double t, int j, const LatticePoint& x0,
                               const std::vector<int>& axes);

}  // namespace isocap
