#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "isocap/capacity.hpp"

namespace isocap {

enum class ObjectiveKind { PCapacity, Relative, Eigen };

/// What the optimizer minimizes at fixed cardinality. Capacity objectives are solved on an
/// origin-centred ball that stays fixed along a trajectory: radius R N^{1/d} for the relative
/// capacity, domain_factor N^{1/d} for the truncated p-capacity (unless `fixed_domain` is set).
struct Objective {
  ObjectiveKind kind = ObjectiveKind::PCapacity;
  double p = 2.0;
  double R = 3.0;
  double domain_factor = 3.0;
  std::optional<Domain> fixed_domain;
  SolverOptions solver;
  EigenOptions eigen;

  static Objective p_capacity(double p, double domain_factor = 3.0);
  static Objective relative(double R);
  static Objective eigenvalue();

  bool uses_domain() const { return kind != ObjectiveKind::Eigen; }
  double exponent() const { return kind == ObjectiveKind::PCapacity ? p : 2.0; }
  Domain domain_for(int d, long n) const;
  /// "pcap", "relative" or "eigen"
  std::string label() const;
  /// p for pcap, R for relative, 0 for eigen
  double param() const;
};

struct Evaluation {
  double value = 0.0;
  LatticeFunction potential;  // capacitary potential, or the ground state for the eigen objective
  bool converged = true;
  double residual = 0.0;
};

/// Translation-free (unless `translate`) lexicographically minimal image under signed coordinate permutations.
std::vector<int> canonical_key(const LatticeSet& x, bool translate);

/// Solves objectives and caches their values by canonical form.
class ObjectiveEvaluator {
 public:
  explicit ObjectiveEvaluator(Objective obj) : obj_(std::move(obj)) {}

  const Objective& objective() const { return obj_; }
  /// Full solve (potential included); refreshes the cache.
  Evaluation evaluate(const LatticeSet& x, const LatticeFunction* warm = nullptr);
  /// Cached value when available, otherwise a full solve.
  double value(const LatticeSet& x, const LatticeFunction* warm = nullptr);

  /// True when every point of x may carry the constraint u = 1.
  bool feasible(const LatticeSet& x) const;
  bool admissible_point(const LatticePoint& i, long n) const;

  long solves() const { return solves_; }
  long cache_hits() const { return hits_; }

 private:
  Objective obj_;
  std::map<std::vector<int>, double> cache_;
  long solves_ = 0;
  long hits_ = 0;
};

/// First N points of Z^d ordered by |i| with lexicographic tie-break.
LatticeSet quasi_ball(int d, long n);

struct DescentResult {
  LatticeSet set;
  Evaluation eval;
  bool changed = false;
  long trimmed = 0;  // extra points of {u* = 1} dropped to keep #X = N
};

/// Potential u of X, its rearrangement u* along xi, then X* = {u* = 1} (or {u* > 0} for the eigen
/// objective). X* is evaluated warm-started from u*, which is admissible for it.
DescentResult descent_step(const LatticeSet& x, const Evaluation& current, const Direction& xi,
                           ObjectiveEvaluator& ev);
LatticeSet symmetrization_descent_step(const LatticeSet& x, const Direction& xi, const Objective& objective);

enum class AcceptMode { Greedy, Anneal };

struct ExchangeOutcome {
  bool accepted = false;
  LatticeSet set;
  Evaluation eval;
  double delta = 0.0;  // candidate value minus current value
  LatticePoint removed, added;
};

/// Removes a high-flux boundary point (low-potential one for the eigen objective) and adds a
/// high-potential exterior neighbour, each picked at random among the best `top_k`. Greedy
/// acceptance keeps the candidate when its value does not exceed the current one; annealing uses
/// the Metropolis rule at `temperature`.
ExchangeOutcome exchange_move(const LatticeSet& x, const Evaluation& current, ObjectiveEvaluator& ev,
                              std::mt19937_64& rng, AcceptMode mode = AcceptMode::Greedy, double temperature = 0.0,
                              int top_k = 5);

struct Budget {
  long max_sweeps = 40;
  long exchange_batch = 12;
  long max_solves = 4000;
  AcceptMode mode = AcceptMode::Greedy;
  int top_k = 5;
  double improve_tol = 1e-10;
  long polish_rounds = 30;
  std::uint64_t seed = 1;
  long perturb = 0;  // random exchange moves applied to the quasi-ball before descent
};

struct HistoryEntry {
  std::string move;
  double value = 0.0;
};

struct SearchState {
  LatticeSet current;
  double current_value = 0.0;
  LatticeSet best;
  double best_value = 0.0;
  Evaluation best_eval;
  std::vector<HistoryEntry> history;
  std::uint64_t seed = 0;
  long solves = 0;
  long sweeps = 0;
  bool converged = false;
  bool budget_exhausted = false;
};

SearchState minimize(int d, long n, const Objective& objective, const Budget& budget = {});

struct AuditReport {
  long n = 0;
  double scaled_perimeter = 0.0;
  double reference_perimeter = 0.0;  // P_N of the quasi-ball with the same N
  double diameter = 0.0;
  double diameter_ratio = 0.0;       // diam / N^{1/d}
  std::vector<bool> convex;          // per axis
  bool all_convex = false;
  std::vector<bool> walled_in;       // per axis, level set {u >= 1/2} through the barycenter
  bool level_set_matches = false;    // {u >= 1} == X (capacities) or {u > 0} == X (eigen)
  // soft checks against fitted constants
  bool perimeter_ok = false;         // P_N <= 2 reference
  bool diameter_ok = false;          // ratio <= 3
};

AuditReport structural_audit(const LatticeSet& x, const Objective& objective);

}  // namespace isocap
