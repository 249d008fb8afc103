#pragma once

#include <map>
#include <utility>

#include "isocap/lattice_function.hpp"

namespace isocap {

/// E_p(u): sum over ordered neighbour pairs, so every edge counts twice.
double energy_p(const LatticeFunction& u, double p);
/// Each edge once; equals energy_p / 2.
double edge_energy_p(const LatticeFunction& u, double p);
/// N^{(p-d)/d} E_p(u)
double energy_scaled(const LatticeFunction& u, double p, long n);
double scale_factor(double p, int d, long n);

/// sum_i |w(i+1) - w(i)|^p
double energy_1d(const Sequence& w, double p);
/// sum_i |w(i) - v(i)|^p
double interaction_1d(const Sequence& w, const Sequence& v, double p);
/// sum_i |w(i) - v(i)|^p + sum_i |w(i+1) - v(i)|^p
double diag_1d(const Sequence& w, const Sequence& v, double p);

/// Slice-wise regrouping of E_p(u) along a direction. Components are in the ordered-pair
/// convention, so `total` is their plain sum and matches energy_p.
///  coordinate e_j: per_slice[a] = 2 E1d(u^a), cross[(a, k)] = 2 E1d(u^a, u^{a+e_k}) for k != j.
///  diagonal e_j + s e_l: per_slice[g] = 2 [Ediag(u^g, u^{g+e_j}) + Ediag(u^g, u^{g+s e_l})] over
///  class-0 slices g; cross[(g, k)] = 2 [E1d(u^g, u^{g+e_k}) + E1d(u^{g+e_j}, u^{g+e_j+e_k})], k not in {j, l}.
struct EnergyBreakdown {
  double total = 0.0;
  std::map<SliceIndex, double> per_slice;
  std::map<std::pair<SliceIndex, int>, double> cross_terms;

  double recombined() const;
};

EnergyBreakdown decompose_energy(const LatticeFunction& u, const Direction& xi, double p);

}  // namespace isocap
