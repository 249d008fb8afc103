#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "isocap/capacity.hpp"
#include "isocap/optimizer.hpp"

namespace isocap {

/// Best value found so far per (d, objective, parameter, N). Entries only ever decrease.
/// These are search estimates of the minimal value, never certified minima.
class BestKnownLedger {
 public:
  static std::string key(int d, const Objective& obj, long n);

  std::optional<double> best(int d, const Objective& obj, long n) const;
  /// Records `value`; returns true when it lowers (or creates) the entry.
  bool update(int d, const Objective& obj, long n, double value, std::uint64_t seed);

  nlohmann::json to_json() const;
  static BestKnownLedger from_json(const nlohmann::json& j);
  /// Missing file gives an empty ledger.
  static BestKnownLedger load(const std::string& path);
  /// Merges with whatever is on disk (minimum wins) before writing.
  void save(const std::string& path) const;

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    double value;
    std::uint64_t seed;
  };
  std::map<std::string, Entry> entries_;
};

struct ExperimentRecord {
  long n = 0;
  int d = 0;
  double param = 0.0;
  double alpha = 0.0;        // objective minus best-known value at this N
  double pn = 0.0;
  double rn = 0.0;
  long sym_diff = 0;         // min over integer centres
  double bound_value = 0.0;  // N (alpha^{1/2} + N^{-1/(2d)} P_N^{1/2})
  double ratio = 0.0;
  std::uint64_t seed = 0;

  double value = 0.0;
  LatticeSet set;
  LatticePoint center;
};

struct ConsistencyCheck {
  long n = 0;
  std::uint64_t seed_x = 0, seed_y = 0;
  long sym_diff_xy = 0;  // #(X delta (Y + z_X - z_Y))
  long bound = 0;        // symDiff(X) + symDiff(Y)
  bool holds = false;
};

struct FluctuationOptions {
  int d = 3;
  std::vector<long> ns;
  Objective objective = Objective::p_capacity(2.0);
  Budget budget;
  int restarts = 3;
  std::uint64_t seed = 1;
  double perturb_fraction = 0.1;
};

struct FluctuationReport {
  std::vector<ExperimentRecord> records;
  std::vector<ConsistencyCheck> consistency;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  double spearman_ratio_n = 0.0;

  nlohmann::json summary() const;
};

/// Runs the optimizer `restarts` times per N (restart r uses seed + r and a random start
/// perturbation), folds every value into the ledger, then reports one record per run.
FluctuationReport run_fluctuation(const FluctuationOptions& opts, BestKnownLedger& ledger);

/// Header "N,d,param,alphaN,PN,rN,symDiff,boundValue,ratio,seed"; the last row has N = max and
/// carries the maximal ratio. With `timestamp` the first line is a '#' comment with the run time.
void write_fluctuation_csv(std::ostream& out, const FluctuationReport& r, bool timestamp = true);

struct ConvergenceRecord {
  double k = 0.0;
  long n = 0;
  double discrete = 0.0;  // truncation-corrected N^{(p-d)/d} cap_p, single-edge normalization
  double target = 0.0;    // |B_1|^{(p-d)/d} cap_p(B_1)
  double error = 0.0;     // |discrete - target|
  double fitted_exponent = 0.0;

  double relative_error() const { return error / target; }
};

struct ConvergenceOptions {
  double p = 2.0;
  int d = 3;
  std::vector<double> ks;
  double truncation_factor = 1.5;
  SolverOptions solver;
};

struct ConvergenceReport {
  std::vector<ConvergenceRecord> records;
  double fitted_exponent = 0.0;  // slope of log error against log N
  double fitted_intercept = 0.0;
  std::vector<double> seconds;   // per k
};

/// Lattice balls of radius k about the origin against the continuum ball value.
ConvergenceReport run_convergence(const ConvergenceOptions& opts);

/// Header "k,N,discreteValue,continuumTarget,error,fittedExponent".
void write_convergence_csv(std::ostream& out, const ConvergenceReport& r, bool timestamp = true);

/// Fixed formatting used by every CSV writer.
std::string format_real(double v);

nlohmann::json to_json(const CapacityResult& r);
nlohmann::json to_json(const LatticeSet& x);
nlohmann::json to_json(const AuditReport& a);

}  // namespace isocap
