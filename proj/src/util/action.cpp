#include "arena/action.hpp"

#include "arena/error.hpp"

namespace arena {

bool is_nav(const Action& a) { return std::holds_alternative<nav::NavAction>(a); }

util::Json action_to_json(const Action& a) {
  util::Json out = util::Json::object();
  if (const auto* n = std::get_if<nav::NavAction>(&a)) {
    out["kind"] = std::string(nav::nav_kind_name(n->kind));
    switch (n->kind) {
      case nav::NavAction::Kind::kGotoViewpoint:
      case nav::NavAction::Kind::kGotoRoom: out["name"] = n->name; break;
      case nav::NavAction::Kind::kGotoObject: out["target"] = n->name; break;
      case nav::NavAction::Kind::kMoveForward:
      case nav::NavAction::Kind::kMoveBackward: out["cells"] = n->amount; break;
      case nav::NavAction::Kind::kRotate: out["degrees"] = n->amount; break;
      case nav::NavAction::Kind::kLookAround: break;
    }
    return out;
  }
  const auto& i = std::get<affordance::InteractionAction>(a);
  out["kind"] = std::string(affordance::verb_name(i.verb));
  out["target"] = i.target;
  if (i.secondary) out["secondary"] = *i.secondary;
  return out;
}

Action action_from_json(const util::Json& value, const std::string& where) {
  if (!value.is_object()) throw Error(Errc::kValidationError, where + ": expected an object");
  util::FieldReader r(value, where);
  const std::string kind = r.required_string("kind");
  if (auto nk = nav::parse_nav_kind(kind)) {
    nav::NavAction n;
    n.kind = *nk;
    switch (*nk) {
      case nav::NavAction::Kind::kGotoViewpoint:
      case nav::NavAction::Kind::kGotoRoom: n.name = r.required_string("name"); break;
      case nav::NavAction::Kind::kGotoObject: n.name = r.required_string("target"); break;
      case nav::NavAction::Kind::kMoveForward:
      case nav::NavAction::Kind::kMoveBackward:
        n.amount = static_cast<int>(r.required_int("cells"));
        break;
      case nav::NavAction::Kind::kRotate: n.amount = static_cast<int>(r.required_int("degrees")); break;
      case nav::NavAction::Kind::kLookAround: break;
    }
    r.reject_unknown();
    if (!n.well_formed()) throw Error(Errc::kValidationError, where + ": malformed " + kind);
    return n;
  }
  auto verb = affordance::parse_verb(kind);
  if (!verb) throw Error(Errc::kValidationError, r.path("kind") + ": unknown action '" + kind + "'");
  affordance::InteractionAction i;
  i.verb = *verb;
  i.target = r.required_string("target");
  i.secondary = r.optional_string("secondary");
  r.reject_unknown();
  if (!i.well_formed()) {
    throw Error(Errc::kValidationError,
                where + ": " + kind + (affordance::verb_takes_secondary(*verb) ? " needs" : " takes no") +
                    " secondary object");
  }
  return i;
}

std::string action_label(const Action& a) {
  if (const auto* n = std::get_if<nav::NavAction>(&a)) {
    const std::string k(nav::nav_kind_name(n->kind));
    switch (n->kind) {
      case nav::NavAction::Kind::kGotoViewpoint:
      case nav::NavAction::Kind::kGotoRoom:
      case nav::NavAction::Kind::kGotoObject: return k + "(" + n->name + ")";
      case nav::NavAction::Kind::kLookAround: return k;
      default: return k + "(" + std::to_string(n->amount) + ")";
    }
  }
  const auto& i = std::get<affordance::InteractionAction>(a);
  std::string s = std::string(affordance::verb_name(i.verb)) + "(" + i.target;
  if (i.secondary) s += ", " + *i.secondary;
  return s + ")";
}

}  // namespace arena
