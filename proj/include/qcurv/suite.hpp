#pragma once

// The acceptance battery: eleven criteria, each with its own tolerances.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qcurv/core.hpp"

namespace qcurv {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // first failing check, or a short summary
  std::vector<std::pair<std::string, double>> metrics;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = 20240611;
};

/// Runs every criterion in order; exceptions inside a criterion fail it.
/// `on_result` is called after each criterion finishes.
std::vector<CriterionResult> run_suite(const SuiteOptions& opt = {},
                                       const std::function<void(const CriterionResult&)>& on_result = {});

inline constexpr double kSuiteBudgetSeconds = 300.0;

}  // namespace qcurv
