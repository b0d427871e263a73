#pragma once

#include <string>

#include "arena/cdf/cdf.hpp"
#include "arena/planner/search.hpp"
#include "arena/resources.hpp"
#include "arena/runtime/session.hpp"

namespace arena::planner {

struct Demonstration {
  Plan plan;
  std::string log;  // JSONL episode log of the replay
};

// compile -> solve -> replay through a session. A rejected step or a final
// m=0 throws ReplayDivergence; search errors propagate.
Demonstration demonstrate(const cdf::CDF& cdf, const Resources& res, const SearchOptions& search = {},
                          const runtime::SessionConfig& config = {});

// Runs an already-found plan through a session; same checks as demonstrate.
Demonstration execute_plan(const cdf::CDF& cdf, const Resources& res, Plan plan,
                           const runtime::SessionConfig& config = {});

// True when compile and solve both succeed within the search budget.
bool solvable(const cdf::CDF& cdf, const Resources& res, const SearchOptions& search = {});

}  // namespace arena::planner
