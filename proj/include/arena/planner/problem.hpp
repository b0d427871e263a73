#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/action.hpp"
#include "arena/scene/world.hpp"

namespace arena::planner {

using FluentId = uint32_t;

// A ground atom such as (in bowl_1 microwave_1).
struct Fluent {
  std::string predicate;
  std::vector<std::string> args;

  std::string key() const;
  auto operator<=>(const Fluent&) const = default;
};

struct Operator {
  std::string name;  // verb--arg--arg---variant
  std::vector<FluentId> pre;
  std::vector<FluentId> add;
  std::vector<FluentId> del;

  bool operator==(const Operator&) const = default;
};

// Canonical form: fluents sorted by key, id lists sorted and unique,
// operators sorted by name. Two problems with the same content compare equal.
struct PlanningProblem {
  std::string name;
  std::map<std::string, std::string> objects;  // constant -> type
  std::vector<Fluent> fluents;
  std::vector<FluentId> initial;
  std::vector<FluentId> goal;
  std::vector<Operator> operators;

  std::optional<FluentId> find(const Fluent& f) const;
  const Operator* find_operator(std::string_view name) const;
  bool operator==(const PlanningProblem&) const = default;
};

// Collects fluents by key while operators are built, then renumbers.
class ProblemBuilder {
 public:
  FluentId fluent(const std::string& predicate, std::vector<std::string> args = {});
  bool has(const std::string& predicate, const std::vector<std::string>& args) const;
  const Fluent& at(FluentId id) const { return fluents_[id]; }
  size_t fluent_count() const { return fluents_.size(); }

  void add_operator(Operator op);
  void add_goal(FluentId f);
  void set_initial(std::vector<FluentId> ids);

  std::vector<Operator>& operators() { return ops_; }
  const std::vector<FluentId>& goal() const { return goal_; }

  PlanningProblem finish(std::string name) const;

 private:
  std::vector<Fluent> fluents_;
  std::map<std::string, FluentId> index_;
  std::vector<Operator> ops_;
  std::vector<FluentId> goal_;
  std::vector<FluentId> initial_;
};

// Argument types of a predicate: entity, viewpoint, room, liquid or color.
// Throws CompileError for predicates outside the vocabulary.
std::vector<std::string> predicate_signature(std::string_view predicate);

// Sorts and renumbers in place and derives `objects` from the fluents.
// Throws CompileError on duplicate operator names or a name used with two types.
void canonicalize(PlanningProblem& p);

// Truth of a fluent in a concrete world. `start` is the mission's starting
// cell, which backs the "start" pseudo viewpoint.
bool fluent_holds(const Fluent& f, const scene::WorldState& world, scene::Cell start);
std::vector<FluentId> abstract_state(const PlanningProblem& p, const scene::WorldState& world,
                                     scene::Cell start);

inline constexpr std::string_view kStartPlace = "start";

// Runtime action named by an operator; Goto operators map to GotoViewpoint.
Action operator_action(std::string_view op_name);

}  // namespace arena::planner
