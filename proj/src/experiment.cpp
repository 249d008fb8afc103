#include "isocap/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "isocap/continuum.hpp"
#include "isocap/numeric.hpp"

namespace isocap {

using nlohmann::json;

std::string format_real(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string BestKnownLedger::key(int d, const Objective& obj, long n) {
  return "d=" + std::to_string(d) + "/" + obj.label() + "/" + format_real(obj.param()) + "/N=" + std::to_string(n);
}

std::optional<double> BestKnownLedger::best(int d, const Objective& obj, long n) const {
  const auto it = entries_.find(key(d, obj, n));
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

bool BestKnownLedger::update(int d, const Objective& obj, long n, double value, std::uint64_t seed) {
  const std::string k = key(d, obj, n);
  const auto it = entries_.find(k);
  if (it != entries_.end() && it->second.value <= value) return false;
  entries_[k] = Entry{value, seed};
  return true;
}

json BestKnownLedger::to_json() const {
  json j = json::object();
  for (const auto& [k, e] : entries_) j[k] = {{"value", e.value}, {"seed", e.seed}};
  return j;
}

BestKnownLedger BestKnownLedger::from_json(const json& j) {
  BestKnownLedger l;
  if (!j.is_object()) throw ParseError("ledger: expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_object() || !v.contains("value") || !v["value"].is_number())
      throw ParseError("ledger: malformed entry '" + k + "'");
    l.entries_[k] = Entry{v["value"].get<double>(), v.value("seed", std::uint64_t{0})};
  }
  return l;
}

BestKnownLedger BestKnownLedger::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("ledger " + path + ": " + e.what());
  }
  return from_json(j);
}

void BestKnownLedger::save(const std::string& path) const {
  BestKnownLedger merged = load(path);
  for (const auto& [k, e] : entries_) {
    const auto it = merged.entries_.find(k);
    if (it == merged.entries_.end() || e.value < it->second.value) merged.entries_[k] = e;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << merged.to_json().dump(2) << "\n";
}

FluctuationReport run_fluctuation(const FluctuationOptions& opts, BestKnownLedger& ledger) {
  if (opts.restarts < 1) throw std::invalid_argument("fluctuation needs at least one restart");
  if (!std::is_sorted(opts.ns.begin(), opts.ns.end())) throw std::invalid_argument("N list must be nondecreasing");
  const int d = opts.d;
  FluctuationReport rep;
  for (const long n : opts.ns) {
    if (n < 1) throw std::invalid_argument("N must be positive");
    std::vector<ExperimentRecord> runs;
    for (int r = 0; r < opts.restarts; ++r) {
      Budget b = opts.budget;
      b.seed = opts.seed + static_cast<std::uint64_t>(r);
      b.perturb = n >= 2 ? static_cast<long>(std::ceil(opts.perturb_fraction * static_cast<double>(n))) : 0;
      const SearchState st = minimize(d, n, opts.objective, b);
      ledger.update(d, opts.objective, n, st.best_value, b.seed);
      ExperimentRecord rec;
      rec.n = n;
      rec.d = d;
      rec.param = opts.objective.param();
      rec.seed = b.seed;
      rec.value = st.best_value;
      rec.set = st.best;
      runs.push_back(std::move(rec));
    }
    const double m = *ledger.best(d, opts.objective, n);
    const double rn = r_alpha(static_cast<double>(n), d);
    for (auto& rec : runs) {
      rec.alpha = std::max(0.0, rec.value - m);
      rec.pn = scaled_perimeter(rec.set);
      rec.rn = rn;
      const BallMatch bm = min_sym_diff_to_ball(rec.set, rn);
      rec.sym_diff = static_cast<long>(bm.count);
      rec.center = bm.center;
      const double nn = static_cast<double>(n);
      rec.bound_value = nn * (std::sqrt(rec.alpha) + std::pow(nn, -1.0 / (2.0 * d)) * std::sqrt(rec.pn));
      rec.ratio = rec.bound_value > 0 ? static_cast<double>(rec.sym_diff) / rec.bound_value : 0.0;
    }
    for (std::size_t a = 0; a < runs.size(); ++a)
      for (std::size_t b = a + 1; b < runs.size(); ++b) {
        ConsistencyCheck c;
        c.n = n;
        c.seed_x = runs[a].seed;
        c.seed_y = runs[b].seed;
        const LatticeSet y = runs[b].set.translated(runs[a].center - runs[b].center);
        c.sym_diff_xy = static_cast<long>(sym_diff_count(runs[a].set, y));
        c.bound = runs[a].sym_diff + runs[b].sym_diff;
        c.holds = c.sym_diff_xy <= c.bound;
        rep.consistency.push_back(c);
      }
    for (auto& rec : runs) rep.records.push_back(std::move(rec));
  }
  std::vector<double> ratios, ns;
  for (const auto& r : rep.records) {
    ratios.push_back(r.ratio);
    ns.push_back(static_cast<double>(r.n));
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
  }
  if (!ratios.empty()) rep.median_ratio = median(ratios);
  if (ratios.size() >= 2) rep.spearman_ratio_n = spearman(ns, ratios);
  return rep;
}

json FluctuationReport::summary() const {
  json j;
  j["max_ratio"] = max_ratio;
  j["median_ratio"] = median_ratio;
  j["max_over_median"] = median_ratio > 0 ? json(max_ratio / median_ratio) : json(nullptr);
  j["spearman_ratio_vs_N"] = spearman_ratio_n;
  j["alpha_reference"] = "alpha_N is measured against the best value found so far (ledger), not a proven minimum";
  json rows = json::array();
  for (const auto& r : records)
    rows.push_back({{"N", r.n}, {"seed", r.seed}, {"value", r.value}, {"alphaN", r.alpha}, {"symDiff", r.sym_diff},
                    {"ratio", r.ratio}, {"center", r.center.str()}});
  j["runs"] = rows;
  json cons = json::array();
  bool all = true;
  for (const auto& c : consistency) {
    cons.push_back({{"N", c.n}, {"seed_x", c.seed_x}, {"seed_y", c.seed_y}, {"symDiffXY", c.sym_diff_xy},
                    {"bound", c.bound}, {"holds", c.holds}});
    all = all && c.holds;
  }
  j["consistency"] = cons;
  j["consistency_holds"] = all;
  return j;
}

void write_fluctuation_csv(std::ostream& out, const FluctuationReport& r, bool timestamp) {
  if (timestamp) out << "# generated " << utc_now() << "\n";
  out << "N,d,param,alphaN,PN,rN,symDiff,boundValue,ratio,seed\n";
  for (const auto& e : r.records)
    out << e.n << ',' << e.d << ',' << format_real(e.param) << ',' << format_real(e.alpha) << ','
        << format_real(e.pn) << ',' << format_real(e.rn) << ',' << e.sym_diff << ',' << format_real(e.bound_value)
        << ',' << format_real(e.ratio) << ',' << e.seed << "\n";
  if (!r.records.empty()) {
    const auto& f = r.records.front();
    out << "max," << f.d << ',' << format_real(f.param) << ",,,,,," << format_real(r.max_ratio) << ",\n";
  }
}

ConvergenceReport run_convergence(const ConvergenceOptions& opts) {
  ConvergenceReport rep;
  const double target = scaled_ball_target(opts.p, opts.d);
  LatticePoint origin(opts.d);
  for (const double k : opts.ks) {
    if (!(k >= 2)) throw std::invalid_argument("convergence needs k >= 2");
    const auto t0 = std::chrono::steady_clock::now();
    const LatticeSet x = lattice_ball(k, origin);
    CapacityOptions co;
    co.solver = opts.solver;
    co.truncation_factor = opts.truncation_factor;
    co.correct_truncation = true;
    const CapacityResult res = p_capacity(x, opts.p, co);
    ConvergenceRecord rec;
    rec.k = k;
    rec.n = static_cast<long>(x.size());
    rec.discrete = res.corrected_edge_value().value_or(res.edge_value());
    rec.target = target;
    rec.error = std::abs(rec.discrete - target);
    rep.records.push_back(rec);
    rep.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::vector<double> lx, ly;
  for (const auto& r : rep.records)
    if (r.error > 0) {
      lx.push_back(std::log(static_cast<double>(r.n)));
      ly.push_back(std::log(r.error));
    }
  if (lx.size() >= 2) {
    const LinearFit f = fit_line(lx, ly);
    rep.fitted_exponent = f.slope;
    rep.fitted_intercept = f.intercept;
  }
  for (auto& r : rep.records) r.fitted_exponent = rep.fitted_exponent;
  return rep;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& r, bool timestamp) {
  if (timestamp) out << "# generated " << utc_now() << "\n";
  out << "k,N,discreteValue,continuumTarget,error,fittedExponent\n";
  for (const auto& e : r.records)
    out << format_real(e.k) << ',' << e.n << ',' << format_real(e.discrete) << ',' << format_real(e.target) << ','
        << format_real(e.error) << ',' << format_real(e.fitted_exponent) << "\n";
}

json to_json(const LatticeSet& x) {
  json pts = json::array();
  for (const auto& p : x) {
    json c = json::array();
    for (int a = 0; a < p.dim(); ++a) c.push_back(p[a]);
    pts.push_back(c);
  }
  return {{"dim", x.dim()}, {"N", x.size()}, {"points", pts}};
}

json to_json(const CapacityResult& r) {
  json j;
  j["p"] = r.p;
  j["N"] = r.n;
  j["value"] = r.value;
  j["raw_value"] = r.raw_value;
  j["edge_value"] = r.edge_value();
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["unknowns"] = r.unknowns;
  j["domain"] = {{"center", r.domain.center.str()}, {"radius", r.domain.radius}};
  j["truncation_radius"] = r.truncation_radius ? json(*r.truncation_radius) : json(nullptr);
  j["corrected_value"] = r.corrected_value ? json(*r.corrected_value) : json(nullptr);
  j["effective_radius"] = r.effective_radius ? json(*r.effective_radius) : json(nullptr);
  return j;
}

json to_json(const AuditReport& a) {
  json j;
  j["N"] = a.n;
  j["scaled_perimeter"] = a.scaled_perimeter;
  j["reference_perimeter"] = a.reference_perimeter;
  j["diameter"] = a.diameter;
  j["diameter_ratio"] = a.diameter_ratio;
  j["convex"] = a.convex;
  j["all_convex"] = a.all_convex;
  j["walled_in"] = a.walled_in;
  j["level_set_matches"] = a.level_set_matches;
  j["perimeter_ok"] = a.perimeter_ok;
  j["diameter_ok"] = a.diameter_ok;
  return j;
}

}  // namespace isocap
