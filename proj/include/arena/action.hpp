#pragma once

#include <string>
#include <variant>

#include "arena/affordance/actions.hpp"
#include "arena/nav/nav.hpp"
#include "arena/util/json.hpp"

namespace arena {

// Anything the robot can be told to do in one step.
using Action = std::variant<nav::NavAction, affordance::InteractionAction>;

bool is_nav(const Action& a);

// {"kind": "GotoViewpoint", "name": ...}, {"kind": "GotoObject", "target": ...},
// {"kind": "MoveForward", "cells": k}, {"kind": "Rotate", "degrees": d},
// {"kind": "Place", "target": ..., "secondary": ...}
util::Json action_to_json(const Action& a);
// Throws ValidationError with a field path.
Action action_from_json(const util::Json& value, const std::string& where = "action");

// Short human form, e.g. "Place(bowl_1, table_1)".
std::string action_label(const Action& a);

}  // namespace arena
