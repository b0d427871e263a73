#pragma once

#include "arena/cdf/cdf.hpp"
#include "arena/planner/problem.hpp"
#include "arena/resources.hpp"

namespace arena::planner {

// Grounds a mission into a STRIPS problem. Navigation is viewpoint-granular:
// an object is workable from a viewpoint when it is within interaction range
// of the viewpoint cell. Device behaviors are grounded per exact content set
// of the receptacles they act on. Throws CompileError when a goal cannot be
// expressed or has no producing operator.
PlanningProblem compile(const cdf::CDF& cdf, const Resources& res);

}  // namespace arena::planner
