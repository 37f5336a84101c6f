#include "ccx/oracle/grid.hpp"

#include <algorithm>

namespace ccx::oracle {

std::vector<ClaimScenario> acceptance_grid() {
  const std::int64_t times[] = {0, 1, 100, 183, 184, 212, 213, 214, 240, 364, 365};
  const std::int64_t visits[] = {0, 30, 150, 183, 184};
  const std::int64_t ages[] = {30, 79, 80};
  std::vector<ClaimScenario> out;
  for (auto time : times) {
    for (auto visit : visits) {
      std::vector<std::int64_t> confirms{visit, 198, 213, 214, 244};
      std::sort(confirms.begin(), confirms.end());
      confirms.erase(std::unique(confirms.begin(), confirms.end()), confirms.end());
      for (auto confirm : confirms) {
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 5; ++c) {
            for (auto age : ages) {
              out.push_back({time, visit, confirm, static_cast<Reason>(r), static_cast<Cause>(c), age, false});
            }
          }
        }
      }
    }
  }
  return out;
}

std::string reference_goal(const ClaimScenario& s) {
  return "claim_covered(" + std::to_string(s.time_days) + ", " + std::to_string(s.visit_time_days.value_or(-1)) +
         ", " + std::to_string(s.confirm_time_days.value_or(-1)) + ", " + engine_reason_argument(s) + ", " +
         std::to_string(s.age_years) + ")";
}

}  // namespace ccx::oracle
