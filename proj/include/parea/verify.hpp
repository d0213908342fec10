#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "parea/io.hpp"

namespace parea {

struct InvariantCheck {
  std::string name;
  std::string relation;  // "<=" or ">="
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<InvariantCheck> checks;
  bool all_pass() const;
  Json to_json() const;
};

// Names of the invariants, in report order.
std::vector<std::string> invariant_names();

// Runs the whole suite. `overrides` replaces thresholds by name; unknown names throw SchemaError.
VerifyReport run_invariant_suite(std::uint64_t seed, const std::map<std::string, double>& overrides = {});

}  // namespace parea
