#include "arena/planner/demonstrate.hpp"

#include "arena/error.hpp"
#include "arena/planner/compile.hpp"

namespace arena::planner {

Demonstration demonstrate(const cdf::CDF& cdf, const Resources& res, const SearchOptions& search,
                          const runtime::SessionConfig& config) {
  return execute_plan(cdf, res, solve(compile(cdf, res), search), config);
}

Demonstration execute_plan(const cdf::CDF& cdf, const Resources& res, Plan plan,
                           const runtime::SessionConfig& config) {
  Demonstration d;
  d.plan = std::move(plan);
  runtime::Session s(cdf, res, config);
  for (size_t i = 0; i < d.plan.steps.size(); ++i) {
    if (!s.running()) {
      throw Error(Errc::kReplayDivergence, cdf.cdf_id + ": session ended before step " + std::to_string(i));
    }
    const auto out = s.step(d.plan.steps[i]);
    if (!out.result.success) {
      throw Error(Errc::kReplayDivergence, cdf.cdf_id + ": step " + std::to_string(i) + " " +
                                               action_label(d.plan.steps[i]) + " failed: " + out.result.message);
    }
  }
  if (s.goal_status().m() != 1) {
    throw Error(Errc::kReplayDivergence, cdf.cdf_id + ": plan executed but the mission is not complete");
  }
  d.log = s.log_text();
  return d;
}

bool solvable(const cdf::CDF& cdf, const Resources& res, const SearchOptions& search) {
  try {
    solve(compile(cdf, res), search);
    return true;
  } catch (const Error& e) {
    if (e.code() == Errc::kCompileError || e.code() == Errc::kUnsolvable || e.code() == Errc::kBudgetExceeded) {
      return false;
    }
    throw;
  }
}

}  // namespace arena::planner
