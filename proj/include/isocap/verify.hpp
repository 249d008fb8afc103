#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "isocap/lattice_function.hpp"

namespace isocap {

/// One-dimensional kernels the property checks go through. Swapping one for a broken version is
/// how the suite is mutation-tested.
struct Kernels {
  std::function<double(const Sequence&, double)> energy_1d;
  std::function<double(const Sequence&, const Sequence&, double)> interaction_1d;
  std::function<double(const Sequence&, const Sequence&, double)> diag_1d;

  static Kernels reference();
};

struct VerifyOptions {
  std::vector<std::string> suites;  // empty: every suite
  long trials = 0;                  // 0: per-property defaults
  std::uint64_t seed = 2024;
  Kernels kernels = Kernels::reference();
};

struct PropertyResult {
  std::string suite;
  std::string name;
  long trials = 0;
  long failures = 0;
  double worst = 0.0;      // largest violation seen (property-specific units)
  nlohmann::json witness;  // first failing case
  double seconds = 0.0;

  bool passed() const { return failures == 0; }
};

struct VerifyReport {
  std::vector<PropertyResult> properties;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// lattice, energy, rearrangement, capacity, continuum, embedding, optimizer
const std::vector<std::string>& verify_suites();

/// Throws std::invalid_argument for an unknown suite name.
VerifyReport run_verify(const VerifyOptions& opts);

}  // namespace isocap
