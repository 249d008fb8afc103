#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "isocap/capacity.hpp"
#include "isocap/optimizer.hpp"

namespace isocap {

/// Run settings read from "key = value" text. '#' starts a comment at the beginning of a line or
/// after whitespace.
/// Unknown keys and malformed values throw ParseError.
struct Settings {
  SolverOptions solver;
  EigenOptions eigen;
  double truncation_factor = 4.0;
  bool correct_truncation = true;
  double domain_factor = 3.0;     // optimizer p-capacity domain radius / N^{1/d}
  Budget budget;
  double perturb_fraction = 0.1;  // fluctuation restarts: random exchanges = ceil(fraction N)
  std::string ledger;             // best-known value registry, empty for none

  /// Keys and their current values, in the file syntax.
  std::map<std::string, std::string> dump() const;
};

void apply_setting(Settings& s, const std::string& key, const std::string& value);

Settings read_settings(std::istream& in, Settings base = {});
Settings read_settings_file(const std::string& path, Settings base = {});

}  // namespace isocap
