#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ptbec::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 11;

/// Runs the listed criteria (all when empty) in ascending order. Errors raised
/// inside a criterion mark it failed. `report` sees each result as it finishes.
std::vector<CriterionResult> run(std::vector<int> ids = {},
                                 const std::function<void(const CriterionResult&)>& report = {});

/// One line: "[PASS] 7 gpe triple point (12.3 s): detail".
std::string format(const CriterionResult& r);

}  // namespace ptbec::acceptance
