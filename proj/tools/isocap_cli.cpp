// isocap: command-line driver for capacities, set optimization and the experiment pipelines.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "isocap/capacity.hpp"
#include "isocap/config.hpp"
#include "isocap/experiment.hpp"
#include "isocap/optimizer.hpp"
#include "isocap/verify.hpp"

using namespace isocap;
using nlohmann::json;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInvalid = 3;

struct ObjectiveFlags {
  std::string mode = "pcap";
  double p = 2.0;
  double R = 3.0;
};

void add_objective_flags(CLI::App* cmd, ObjectiveFlags& f) {
  cmd->add_option("--mode", f.mode, "pcap | relative | eigen")
      ->check(CLI::IsMember({"pcap", "relative", "eigen"}))
      ->capture_default_str();
  cmd->add_option("--p", f.p, "exponent for pcap")->capture_default_str();
  cmd->add_option("--R", f.R, "outer radius factor for relative")->capture_default_str();
}

Objective make_objective(const ObjectiveFlags& f, const Settings& s) {
  Objective o;
  if (f.mode == "pcap")
    o = Objective::p_capacity(f.p, s.domain_factor);
  else if (f.mode == "relative")
    o = Objective::relative(f.R);
  else
    o = Objective::eigenvalue();
  o.solver = s.solver;
  o.eigen = s.eigen;
  return o;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Settings load_settings(const std::string& path) { return path.empty() ? Settings{} : read_settings_file(path); }

int cmd_solve(const std::string& set_file, const ObjectiveFlags& f, const Settings& s, const std::string& out,
              const std::string& dump) {
  const LatticeSet x = read_set_file(set_file);
  json j;
  LatticeFunction potential;
  if (f.mode == "eigen") {
    EigenResult r = eigen_ground_state(x, s.eigen);
    j = {{"mode", "eigen"}, {"N", x.size()},        {"eigenvalue", r.eigenvalue},
         {"residual", r.residual}, {"iterations", r.iterations}, {"converged", r.converged}};
    potential = std::move(r.eigenfunction);
  } else {
    CapacityResult r;
    if (f.mode == "relative") {
      r = relative_capacity(x, f.R, s.solver);
    } else {
      CapacityOptions co;
      co.solver = s.solver;
      co.truncation_factor = s.truncation_factor;
      co.correct_truncation = s.correct_truncation;
      r = p_capacity(x, f.p, co);
    }
    j = to_json(r);
    j["mode"] = f.mode;
    potential = std::move(r.potential);
  }
  if (!dump.empty()) {
    std::ofstream pf(dump);
    if (!pf) throw std::runtime_error("cannot write " + dump);
    write_function(pf, potential);
    j["potential_file"] = dump;
  }
  emit(out, j.dump(2) + "\n");
  return 0;
}

int cmd_minimize(int d, long n, const ObjectiveFlags& f, Settings s, std::uint64_t seed, const std::string& out,
                 const std::string& save_set) {
  const Objective obj = make_objective(f, s);
  s.budget.seed = seed;
  const SearchState st = minimize(d, n, obj, s.budget);
  const AuditReport audit = structural_audit(st.best, obj);
  json hist = json::array();
  for (const auto& h : st.history) hist.push_back({{"move", h.move}, {"value", h.value}});
  json j = {{"objective", obj.label()},
            {"param", obj.param()},
            {"dim", d},
            {"N", n},
            {"value", st.best_value},
            {"value_note", "best value found by the search, not a certified minimum"},
            {"seed", st.seed},
            {"solves", st.solves},
            {"sweeps", st.sweeps},
            {"converged", st.converged},
            {"budget_exhausted", st.budget_exhausted},
            {"history", hist},
            {"audit", to_json(audit)},
            {"set", to_json(st.best)}};
  if (!save_set.empty()) {
    std::ofstream sf(save_set);
    if (!sf) throw std::runtime_error("cannot write " + save_set);
    sf << "# objective " << obj.label() << " param " << format_real(obj.param()) << "\n";
    sf << "# value " << format_real(st.best_value) << "\n";
    sf << "# seed " << st.seed << " solves " << st.solves << " sweeps " << st.sweeps << "\n";
    write_set(sf, st.best);
  }
  emit(out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice capacities, rearrangements and isocapacitary experiments"};
  app.require_subcommand(1);
  std::string config;
  app.add_option("--config", config, "key = value settings file");

  ObjectiveFlags obj;
  std::string out, dump, set_file, save_set, summary, ledger_path;
  int dim = 3;
  long n = 1;
  std::vector<long> ns;
  std::vector<double> ks;
  std::uint64_t seed = 1;
  int restarts = 3;
  double truncation = 1.5;
  bool no_timestamp = false;
  std::vector<std::string> suites;
  long trials = 0;

  auto* solve = app.add_subcommand("solve", "capacity or ground state of a set file");
  solve->add_option("set", set_file, "set file")->required();
  add_objective_flags(solve, obj);
  solve->add_option("--out", out, "JSON output (default stdout)");
  solve->add_option("--dump-potential", dump, "write the potential in the function file format");

  auto* mini = app.add_subcommand("minimize", "search for a low-value set of N points");
  add_objective_flags(mini, obj);
  mini->add_option("--dim", dim)->capture_default_str();
  mini->add_option("--N", n)->required();
  mini->add_option("--seed", seed)->capture_default_str();
  mini->add_option("--out", out, "JSON output (default stdout)");
  mini->add_option("--save-set", save_set, "set file with a metadata header");

  auto* fluct = app.add_subcommand("fluctuation", "symmetric difference to balls against the bound");
  add_objective_flags(fluct, obj);
  fluct->add_option("--dim", dim)->capture_default_str();
  fluct->add_option("--N", ns, "cardinalities, nondecreasing")->required()->delimiter(',');
  fluct->add_option("--restarts", restarts)->capture_default_str();
  fluct->add_option("--seed", seed)->capture_default_str();
  fluct->add_option("--out", out, "CSV output (default stdout)");
  fluct->add_option("--summary", summary, "JSON summary with the consistency checks");
  fluct->add_option("--ledger", ledger_path, "best-known value ledger (JSON), overrides the config");
  fluct->add_flag("--no-timestamp", no_timestamp);

  auto* conv = app.add_subcommand("convergence", "lattice balls against the continuum ball value");
  conv->add_option("--p", obj.p)->capture_default_str();
  conv->add_option("--dim", dim)->capture_default_str();
  conv->add_option("--k", ks, "ball radii >= 2")->required()->delimiter(',');
  conv->add_option("--truncation", truncation, "domain radius / (diam + N^{1/d})")->capture_default_str();
  conv->add_option("--out", out, "CSV output (default stdout)");
  conv->add_flag("--no-timestamp", no_timestamp);

  auto* ver = app.add_subcommand("verify", "property suites");
  ver->add_option("--suite", suites, "suite name or 'all'")->delimiter(',');
  ver->add_option("--trials", trials, "trials per property (0: defaults)")->capture_default_str();
  ver->add_option("--seed", seed)->capture_default_str();
  ver->add_option("--out", out, "JSON report (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    Settings settings = load_settings(config);
    if (*solve) return cmd_solve(set_file, obj, settings, out, dump);
    if (*mini) return cmd_minimize(dim, n, obj, settings, seed, out, save_set);
    if (*fluct) {
      FluctuationOptions fo;
      fo.d = dim;
      fo.ns = ns;
      fo.objective = make_objective(obj, settings);
      fo.budget = settings.budget;
      fo.restarts = restarts;
      fo.seed = seed;
      fo.perturb_fraction = settings.perturb_fraction;
      const std::string lp = ledger_path.empty() ? settings.ledger : ledger_path;
      BestKnownLedger ledger = lp.empty() ? BestKnownLedger{} : BestKnownLedger::load(lp);
      const FluctuationReport rep = run_fluctuation(fo, ledger);
      if (!lp.empty()) ledger.save(lp);
      std::ostringstream csv;
      write_fluctuation_csv(csv, rep, !no_timestamp);
      emit(out, csv.str());
      if (!summary.empty()) emit(summary, rep.summary().dump(2) + "\n");
      return 0;
    }
    if (*conv) {
      ConvergenceOptions co;
      co.p = obj.p;
      co.d = dim;
      co.ks = ks;
      co.truncation_factor = truncation;
      co.solver = settings.solver;
      std::ostringstream csv;
      write_convergence_csv(csv, run_convergence(co), !no_timestamp);
      emit(out, csv.str());
      return 0;
    }
    if (*ver) {
      VerifyOptions vo;
      for (const auto& s : suites)
        if (s != "all") vo.suites.push_back(s);
      vo.trials = trials;
      vo.seed = seed;
      const VerifyReport rep = run_verify(vo);
      emit(out, rep.to_json().dump(2) + "\n");
      for (const auto& p : rep.properties)
        if (!p.passed()) std::cerr << "FAIL " << p.suite << "/" << p.name << " (" << p.failures << " of " << p.trials << ")\n";
      return rep.passed() ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
