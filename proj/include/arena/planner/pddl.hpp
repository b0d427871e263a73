#pragma once

#include <string>
#include <string_view>

#include "arena/planner/problem.hpp"

namespace arena::planner {

struct PddlText {
  std::string domain;
  std::string problem;
};

// Typed STRIPS with ground, parameterless actions, one per operator. The
// output is a function of the canonical problem only.
PddlText export_pddl(const PlanningProblem& problem);

// Reads the subset export_pddl writes. Throws ParseError with a line number.
PlanningProblem parse_pddl(std::string_view domain, std::string_view problem);

}  // namespace arena::planner
