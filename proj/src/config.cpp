#include "isocap/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace isocap {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError("bad value for " + key + ": '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("bad boolean for " + key + ": '" + v + "'");
}

std::string show(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Key {
  std::function<void(Settings&, const std::string&, const std::string&)> set;
  std::function<std::string(const Settings&)> get;
};

#define REAL_KEY(name, field)                                                                               \
  {                                                                                                         \
    name, Key{[](Settings& s, const std::string& k, const std::string& v) { s.field = parse_number<double>(k, v); }, \
              [](const Settings& s) { return show(s.field); } }                                             \
  }
#define INT_KEY(name, field)                                                                              \
  {                                                                                                       \
    name, Key{[](Settings& s, const std::string& k, const std::string& v) { s.field = parse_number<long>(k, v); }, \
              [](const Settings& s) { return std::to_string(s.field); } }                                 \
  }
#define BOOL_KEY(name, field)                                                                      \
  {                                                                                                \
    name, Key{[](Settings& s, const std::string& k, const std::string& v) { s.field = parse_bool(k, v); }, \
              [](const Settings& s) { return std::string(s.field ? "true" : "false"); } }          \
  }

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> table = {
      REAL_KEY("solver.tolerance", solver.tolerance),
      INT_KEY("solver.max_iterations", solver.max_iterations),
      REAL_KEY("solver.update_tol", solver.update_tol),
      REAL_KEY("solver.energy_tol", solver.energy_tol),
      INT_KEY("solver.max_sweeps", solver.max_sweeps),
      BOOL_KEY("solver.newton_warm_start", solver.newton_warm_start),
      INT_KEY("solver.max_newton", solver.max_newton),
      {"solver.schedule",
       Key{[](Settings& s, const std::string& k, const std::string& v) {
             if (v == "lexicographic")
               s.solver.schedule = SweepSchedule::Lexicographic;
             else if (v == "red_black")
               s.solver.schedule = SweepSchedule::RedBlack;
             else
               throw ParseError("bad value for " + k + ": '" + v + "'");
           },
           [](const Settings& s) {
             return std::string(s.solver.schedule == SweepSchedule::RedBlack ? "red_black" : "lexicographic");
           }}},
      REAL_KEY("eigen.tolerance", eigen.tolerance),
      INT_KEY("eigen.max_iterations", eigen.max_iterations),
      REAL_KEY("truncation_factor", truncation_factor),
      BOOL_KEY("correct_truncation", correct_truncation),
      REAL_KEY("optimizer.domain_factor", domain_factor),
      INT_KEY("optimizer.max_sweeps", budget.max_sweeps),
      INT_KEY("optimizer.exchange_batch", budget.exchange_batch),
      INT_KEY("optimizer.max_solves", budget.max_solves),
      {"optimizer.mode",
       Key{[](Settings& s, const std::string& k, const std::string& v) {
             if (v == "greedy")
               s.budget.mode = AcceptMode::Greedy;
             else if (v == "anneal")
               s.budget.mode = AcceptMode::Anneal;
             else
               throw ParseError("bad value for " + k + ": '" + v + "'");
           },
           [](const Settings& s) { return std::string(s.budget.mode == AcceptMode::Anneal ? "anneal" : "greedy"); }}},
      {"optimizer.top_k", Key{[](Settings& s, const std::string& k,
                                 const std::string& v) { s.budget.top_k = parse_number<int>(k, v); },
                              [](const Settings& s) { return std::to_string(s.budget.top_k); }}},
      REAL_KEY("optimizer.improve_tol", budget.improve_tol),
      INT_KEY("optimizer.polish_rounds", budget.polish_rounds),
      REAL_KEY("fluctuation.perturb_fraction", perturb_fraction),
      {"ledger", Key{[](Settings& s, const std::string&, const std::string& v) { s.ledger = v; },
                     [](const Settings& s) { return s.ledger; }}},
  };
  return table;
}

#undef REAL_KEY
#undef INT_KEY
#undef BOOL_KEY

}  // namespace

void apply_setting(Settings& s, const std::string& key, const std::string& value) {
  const auto it = keys().find(key);
  if (it == keys().end()) throw ParseError("unknown configuration key '" + key + "'");
  it->second.set(s, key, value);
}

std::map<std::string, std::string> Settings::dump() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, key] : keys()) out[k] = key.get(*this);
  return out;
}

Settings read_settings(std::istream& in, Settings base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    std::string value = t.substr(eq + 1);
    // trailing comment: '#' after whitespace
    for (std::size_t k = 1; k < value.size(); ++k)
      if (value[k] == '#' && std::isspace(static_cast<unsigned char>(value[k - 1]))) {
        value.resize(k);
        break;
      }
    value = trim(value);
    try {
      apply_setting(base, key, value);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

Settings read_settings_file(const std::string& path, Settings base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_settings(in, std::move(base));
}

}  // namespace isocap
