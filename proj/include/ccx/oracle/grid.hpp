#pragma once

#include <string>
#include <vector>

#include "ccx/oracle/oracle.hpp"

namespace ccx::oracle {

/// Boundary-heavy scenario grid: every combination of
/// time {0,1,100,183,184,212,213,214,240,364,365}, visit {0,30,150,183,184},
/// confirm {visit,198,213,214,244}, all reasons, all causes and age
/// {30,79,80}. Confirm values are deduplicated per visit.
std::vector<ClaimScenario> acceptance_grid();

/// `claim_covered(Time, Visit, Confirm, Reason, Age)` for the five-argument
/// reference encoding. Absent wellness times are passed as -1.
std::string reference_goal(const ClaimScenario& s);

}  // namespace ccx::oracle
