#include "arena/planner/problem.hpp"

#include <algorithm>
#include <cctype>

#include "arena/cdf/cdf.hpp"
#include "arena/error.hpp"

namespace arena::planner {

using scene::WorldState;

std::string Fluent::key() const {
  std::string k = "(" + predicate;
  for (const auto& a : args) k += " " + a;
  return k + ")";
}

std::optional<FluentId> PlanningProblem::find(const Fluent& f) const {
  auto it = std::lower_bound(fluents.begin(), fluents.end(), f,
                             [](const Fluent& a, const Fluent& b) { return a.key() < b.key(); });
  if (it == fluents.end() || *it != f) return std::nullopt;
  return static_cast<FluentId>(it - fluents.begin());
}

const Operator* PlanningProblem::find_operator(std::string_view name) const {
  auto it = std::lower_bound(operators.begin(), operators.end(), name,
                             [](const Operator& op, std::string_view n) { return op.name < n; });
  if (it == operators.end() || it->name != name) return nullptr;
  return &*it;
}

FluentId ProblemBuilder::fluent(const std::string& predicate, std::vector<std::string> args) {
  Fluent f{predicate, std::move(args)};
  std::string k = f.key();
  auto it = index_.find(k);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<FluentId>(fluents_.size());
  fluents_.push_back(std::move(f));
  index_.emplace(std::move(k), id);
  return id;
}

bool ProblemBuilder::has(const std::string& predicate, const std::vector<std::string>& args) const {
  return index_.contains(Fluent{predicate, args}.key());
}

void ProblemBuilder::add_operator(Operator op) { ops_.push_back(std::move(op)); }
void ProblemBuilder::add_goal(FluentId f) { goal_.push_back(f); }
void ProblemBuilder::set_initial(std::vector<FluentId> ids) { initial_ = std::move(ids); }

PlanningProblem ProblemBuilder::finish(std::string name) const {
  PlanningProblem p;
  p.name = std::move(name);
  p.fluents = fluents_;
  p.initial = initial_;
  p.goal = goal_;
  p.operators = ops_;
  canonicalize(p);
  return p;
}

std::vector<std::string> predicate_signature(std::string_view p) {
  if (p == "at-vp") return {"viewpoint"};
  if (p == "handempty") return {};
  if (p == "room-power") return {"room"};
  if (p == "in" || p == "on" || p == "not-in") return {"entity", "entity"};
  if (p == "filled") return {"entity", "liquid"};
  if (p == "color") return {"entity", "color"};
  if (p == "holding" || p == "on-floor" || p == "empty" || p == "unspawned" || p == "device-ready") {
    return {"entity"};
  }
  const bool negated = p.rfind("not-", 0) == 0;
  if (scene::parse_flag(negated ? p.substr(4) : p)) return {"entity"};
  throw Error(Errc::kCompileError, "unknown predicate '" + std::string(p) + "'");
}

namespace {

void sort_unique(std::vector<FluentId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

void canonicalize(PlanningProblem& p) {
  // Keep only fluents that something mentions.
  std::vector<char> used(p.fluents.size(), 0);
  auto mark = [&](const std::vector<FluentId>& ids) {
    for (FluentId f : ids) used[f] = 1;
  };
  mark(p.initial);
  mark(p.goal);
  for (const auto& op : p.operators) {
    mark(op.pre);
    mark(op.add);
    mark(op.del);
  }
  std::vector<FluentId> order;
  for (FluentId i = 0; i < p.fluents.size(); ++i) {
    if (used[i]) order.push_back(i);
  }
  std::vector<std::string> keys(p.fluents.size());
  for (FluentId i : order) keys[i] = p.fluents[i].key();
  std::sort(order.begin(), order.end(), [&](FluentId a, FluentId b) { return keys[a] < keys[b]; });
  std::vector<FluentId> remap(p.fluents.size(), 0);
  std::vector<Fluent> fluents;
  for (FluentId i : order) {
    if (!fluents.empty() && fluents.back() == p.fluents[i]) {
      remap[i] = static_cast<FluentId>(fluents.size() - 1);
      continue;
    }
    remap[i] = static_cast<FluentId>(fluents.size());
    fluents.push_back(p.fluents[i]);
  }
  auto apply = [&](std::vector<FluentId>& ids) {
    for (FluentId& f : ids) f = remap[f];
    sort_unique(ids);
  };
  p.fluents = std::move(fluents);
  p.objects.clear();
  for (const Fluent& f : p.fluents) {
    const auto sig = predicate_signature(f.predicate);
    if (sig.size() != f.args.size()) throw Error(Errc::kCompileError, "arity mismatch in " + f.key());
    for (size_t i = 0; i < sig.size(); ++i) {
      auto [it, inserted] = p.objects.emplace(f.args[i], sig[i]);
      if (!inserted && it->second != sig[i]) {
        throw Error(Errc::kCompileError,
                    "name '" + f.args[i] + "' is both a " + it->second + " and a " + sig[i]);
      }
    }
  }
  apply(p.initial);
  apply(p.goal);
  for (auto& op : p.operators) {
    apply(op.pre);
    apply(op.add);
    apply(op.del);
    // Add wins over delete in STRIPS; drop the redundant delete.
    std::vector<FluentId> del;
    std::set_difference(op.del.begin(), op.del.end(), op.add.begin(), op.add.end(),
                        std::back_inserter(del));
    op.del = std::move(del);
  }
  std::sort(p.operators.begin(), p.operators.end(),
            [](const Operator& a, const Operator& b) { return a.name < b.name; });
  for (size_t i = 1; i < p.operators.size(); ++i) {
    if (p.operators[i].name == p.operators[i - 1].name) {
      throw Error(Errc::kCompileError, "duplicate operator '" + p.operators[i].name + "'");
    }
  }
}

bool fluent_holds(const Fluent& f, const WorldState& world, scene::Cell start) {
  const std::string& p = f.predicate;
  auto arg = [&](size_t i) -> const std::string& { return f.args.at(i); };
  if (p == "at-vp") {
    if (arg(0) == kStartPlace) return world.agent.cell == start;
    const scene::Viewpoint* vp = world.layout->viewpoint(arg(0));
    return vp && world.agent.cell == vp->cell;
  }
  if (p == "handempty") return !world.agent.held;
  if (p == "room-power") return world.room_powered(arg(0));
  const scene::ObjectInstance* obj = world.find(arg(0));
  if (p == "unspawned") return obj == nullptr;
  if (p == "not-in") return !(obj && obj->location.has_parent() && obj->location.parent == arg(1));
  if (!obj) return false;
  if (p == "holding") return world.agent.held == arg(0);
  if (p == "on-floor") return obj->location.kind == scene::Location::Kind::kCell;
  if (p == "in") return obj->location.kind == scene::Location::Kind::kInside && obj->location.parent == arg(1);
  if (p == "on") return obj->location.kind == scene::Location::Kind::kOn && obj->location.parent == arg(1);
  if (p == "empty") return !obj->state.filled_with;
  if (p == "filled") return obj->state.filled_with == arg(1);
  if (p == "color") return cdf::effective_color(world, *obj) == arg(1);
  if (p == "device-ready") {
    return !world.class_of(*obj).has(scene::Property::kPowerable) || obj->state.get(scene::Flag::kPowered);
  }
  const bool negated = p.rfind("not-", 0) == 0;
  if (auto flag = scene::parse_flag(negated ? std::string_view(p).substr(4) : std::string_view(p))) {
    return obj->state.get(*flag) != negated;
  }
  throw Error(Errc::kCompileError, "unknown predicate '" + p + "'");
}

std::vector<FluentId> abstract_state(const PlanningProblem& p, const WorldState& world,
                                     scene::Cell start) {
  std::vector<FluentId> out;
  for (FluentId i = 0; i < p.fluents.size(); ++i) {
    if (fluent_holds(p.fluents[i], world, start)) out.push_back(i);
  }
  return out;
}

Action operator_action(std::string_view op_name) {
  std::string_view head = op_name.substr(0, op_name.find("---"));
  std::vector<std::string> parts;
  size_t pos = 0;
  while (true) {
    const size_t next = head.find("--", pos);
    parts.emplace_back(head.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 2;
  }
  if (parts.size() < 2) throw Error(Errc::kParseError, "operator name '" + std::string(op_name) + "'");
  if (parts[0] == "goto") return nav::NavAction::goto_viewpoint(parts[1]);
  for (affordance::Verb v : affordance::kAllVerbs) {
    std::string name(affordance::verb_name(v));
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (name != parts[0]) continue;
    affordance::InteractionAction a{v, parts[1], std::nullopt};
    if (parts.size() > 2) a.secondary = parts[2];
    if (!a.well_formed()) break;
    return a;
  }
  throw Error(Errc::kParseError, "operator name '" + std::string(op_name) + "' names no action");
}

}  // namespace arena::planner
