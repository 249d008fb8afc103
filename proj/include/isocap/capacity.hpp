#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "isocap/lattice_function.hpp"

namespace isocap {

class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepSchedule { Lexicographic, RedBlack };

struct SolverOptions {
  double tolerance = 1e-12;       // CG relative residual
  long max_iterations = 0;        // CG cap; 0 means 10 x unknowns
  double update_tol = 1e-10;      // nonlinear: max node update per sweep
  double energy_tol = 1e-14;      // nonlinear: relative energy decrease per sweep
  long max_sweeps = 200000;
  bool newton_warm_start = true;  // damped Newton-CG before the Gauss-Seidel polish
  long max_newton = 60;
  SweepSchedule schedule = SweepSchedule::Lexicographic;
  bool linear_fast_path = true;   // p = 2 goes through CG
};

/// Open ball {|i - center| < radius}. Nodes of the ball whose 2d neighbours all lie in it are the
/// interior; every other node is held at 0.
struct Domain {
  LatticePoint center;
  double radius = 0.0;

  bool in_ball(const LatticePoint& i) const;
  bool interior(const LatticePoint& i) const;
};

struct CapacityResult {
  double p = 2.0;
  long n = 0;
  double value = 0.0;       // N^{(p-d)/d} E_p(u), ordered pairs
  double raw_value = 0.0;   // E_p(u)
  LatticeFunction potential;
  double residual = 0.0;    // max |sum_j sign(u_i - u_j)|u_i - u_j|^{p-1}| over free nodes
  long iterations = 0;
  bool converged = false;
  long unknowns = 0;
  Domain domain;
  std::optional<double> truncation_radius;
  std::optional<double> corrected_value;   // ordered-pair convention, like `value`
  std::optional<double> effective_radius;

  /// Single-edge normalization (value / 2), the one that matches continuum capacities.
  double edge_value() const { return value / 2.0; }
  std::optional<double> corrected_edge_value() const {
    return corrected_value ? std::optional<double>(*corrected_value / 2.0) : std::nullopt;
  }
};

struct CapacityOptions {
  SolverOptions solver;
  std::optional<Domain> domain;      // explicit truncation ball
  double truncation_factor = 4.0;    // otherwise radius = factor * (diam(X) + N^{1/d}) around the barycenter
  bool correct_truncation = true;
  const LatticeFunction* warm_start = nullptr;
};

/// Relative capacity: zero condition outside the ball of radius R N^{1/d} about the origin.
CapacityResult relative_capacity(const LatticeSet& x, double R, const SolverOptions& opts = {},
                                 const LatticeFunction* warm_start = nullptr);

/// p-capacity on a truncated domain. Requires 1 < p < d.
CapacityResult p_capacity(const LatticeSet& x, double p, const CapacityOptions& opts = {});

/// Minimizes E_p over the given domain with u = 1 on x. Requires p > 1.
CapacityResult solve_on_domain(const LatticeSet& x, double p, const Domain& domain, const SolverOptions& opts = {},
                               const LatticeFunction* warm_start = nullptr);

/// Multiplies out the leading truncation bias of a ball-like set:
/// value (1 - R_eff^{(p-d)/(p-1)})^{p-1}, R_eff = truncation radius / capacity-equivalent radius.
void apply_truncation_correction(CapacityResult& r, int d);

struct PotentialReport {
  double bound_violation = 0.0;       // max distance of u outside [0, 1]
  double constraint_violation = 0.0;  // max |u - 1| on X
  double harmonic_defect = 0.0;       // max p-harmonicity defect at checked nodes
  std::optional<LatticePoint> worst_node;
};

/// Absolute mode checks every node off X; with a domain, only its free nodes.
PotentialReport verify_potential(const LatticeFunction& u, const LatticeSet& x, double p,
                                 const std::optional<Domain>& domain = std::nullopt);

Domain relative_domain(const LatticeSet& x, double R);

struct EigenResult {
  double eigenvalue = 0.0;
  LatticeFunction eigenfunction;  // positive on connected X, (1/N) sum u^2 = 1
  double residual = 0.0;          // ||L u - lambda u|| / ||u||
  long iterations = 0;
  bool converged = false;
};

struct EigenOptions {
  double tolerance = 1e-13;
  long max_iterations = 20000;
};

/// Smallest eigenvalue of the Dirichlet combinatorial Laplacian 2d I - A restricted to X.
EigenResult eigen_ground_state(const LatticeSet& x, const EigenOptions& opts = {},
                               const LatticeFunction* warm_start = nullptr);

struct TruncationRow {
  double radius = 0.0;
  double raw_value = 0.0;
  double value = 0.0;
  std::optional<double> corrected_value;
};

/// Solves on concentric balls of increasing radius about the rounded barycenter.
std::vector<TruncationRow> truncation_study(const LatticeSet& x, double p, const std::vector<double>& radii,
                                            const SolverOptions& opts = {});

}  // namespace isocap
