#include "arena/scene/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arena/error.hpp"

namespace arena::scene {

const ObjectInstance* WorldState::find(std::string_view id) const {
  auto it = objects.find(id);
  return it == objects.end() ? nullptr : &it->second;
}

const ObjectInstance& WorldState::at(std::string_view id) const {
  const ObjectInstance* obj = find(id);
  if (!obj) throw Error(Errc::kUnknownInstance, "unknown instance '" + std::string(id) + "'");
  return *obj;
}

ObjectInstance& WorldState::at(std::string_view id) {
  auto it = objects.find(id);
  if (it == objects.end()) {
    throw Error(Errc::kUnknownInstance, "unknown instance '" + std::string(id) + "'");
  }
  return it->second;
}

Occupancy WorldState::occupancy() const {
  Occupancy occ = layout->base_occupancy();
  for (Cell c : obstacles) occ.block(c);
  for (const auto& [id, obj] : objects) {
    if (obj.location.kind != Location::Kind::kCell) continue;
    const ObjectClass* cls = catalog->find(obj.class_id);
    if (cls && cls->blocking) occ.block(obj.location.cell);
  }
  return occ;
}

const ObjectInstance* WorldState::root(std::string_view id) const {
  const ObjectInstance* cur = find(id);
  for (size_t guard = 0; cur && guard <= objects.size(); ++guard) {
    switch (cur->location.kind) {
      case Location::Kind::kCell: return cur;
      case Location::Kind::kHeld: return nullptr;
      case Location::Kind::kInside:
      case Location::Kind::kOn: cur = find(cur->location.parent); break;
    }
  }
  return nullptr;
}

bool WorldState::held_root(std::string_view id) const {
  const ObjectInstance* cur = find(id);
  for (size_t guard = 0; cur && guard <= objects.size(); ++guard) {
    if (cur->location.kind == Location::Kind::kHeld) return true;
    if (cur->location.kind == Location::Kind::kCell) return false;
    cur = find(cur->location.parent);
  }
  return false;
}

Cell WorldState::position(std::string_view id) const {
  if (const ObjectInstance* r = root(id)) return r->location.cell;
  return agent.cell;
}

bool WorldState::enclosed(std::string_view id) const {
  const ObjectInstance* cur = find(id);
  for (size_t guard = 0; cur && guard <= objects.size(); ++guard) {
    if (!cur->location.has_parent()) return false;
    const ObjectInstance* parent = find(cur->location.parent);
    if (!parent) return false;
    if (cur->location.kind == Location::Kind::kInside) {
      const ObjectClass* cls = catalog->find(parent->class_id);
      if (cls && cls->has(Property::kOpenable) && !parent->state.get(Flag::kOpen)) return true;
    }
    cur = parent;
  }
  return false;
}

std::vector<std::string> WorldState::children(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& [oid, obj] : objects) {
    if (obj.location.has_parent() && obj.location.parent == id) out.push_back(oid);
  }
  return out;
}

std::vector<std::string> WorldState::contents_in(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& [oid, obj] : objects) {
    if (obj.location.kind == Location::Kind::kInside && obj.location.parent == id) {
      out.push_back(oid);
    }
  }
  return out;
}

std::vector<std::string> WorldState::contents_on(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& [oid, obj] : objects) {
    if (obj.location.kind == Location::Kind::kOn && obj.location.parent == id) out.push_back(oid);
  }
  return out;
}

std::optional<std::string> WorldState::room_at(Cell c) const {
  if (const Room* r = layout->room_at(c)) return r->name;
  return std::nullopt;
}

std::string WorldState::agent_room() const { return room_at(agent.cell).value_or(""); }

bool WorldState::room_powered(std::string_view room) const {
  auto it = room_power.find(room);
  return it == room_power.end() ? true : it->second;
}

bool WorldState::operator==(const WorldState& other) const {
  const bool same_layout =
      layout == other.layout || (layout && other.layout && layout->layout_id == other.layout->layout_id);
  return same_layout && catalog == other.catalog && obstacles == other.obstacles &&
         objects == other.objects && agent == other.agent && room_power == other.room_power &&
         tick == other.tick;
}

std::vector<std::string> world_problems(const WorldState& world) {
  std::vector<std::string> problems;
  if (!world.layout || !world.catalog) {
    problems.push_back("world has no layout or catalog");
    return problems;
  }
  const Occupancy occ = world.occupancy();
  if (occ.blocked(world.agent.cell)) problems.push_back("agent occupies a blocked cell");

  size_t held_count = 0;
  for (const auto& [id, obj] : world.objects) {
    const std::string who = "object '" + id + "'";
    if (id != obj.instance_id) problems.push_back(who + ": key does not match instance id");
    const ObjectClass* cls = world.catalog->find(obj.class_id);
    if (!cls) {
      problems.push_back(who + ": unknown class '" + obj.class_id + "'");
      continue;
    }
    switch (obj.location.kind) {
      case Location::Kind::kCell:
        if (world.layout->wall(obj.location.cell) || !world.layout->room_at(obj.location.cell)) {
          problems.push_back(who + ": cell is a wall or outside every room");
        }
        break;
      case Location::Kind::kHeld:
        ++held_count;
        if (world.agent.held != id) problems.push_back(who + ": held but agent holds something else");
        if (!cls->has(Property::kPickupable)) problems.push_back(who + ": held but not pickupable");
        break;
      case Location::Kind::kInside:
      case Location::Kind::kOn: {
        const ObjectInstance* parent = world.find(obj.location.parent);
        if (!parent) {
          problems.push_back(who + ": parent '" + obj.location.parent + "' does not exist");
          break;
        }
        if (parent->instance_id == id) {
          problems.push_back(who + ": contains itself");
          break;
        }
        const ObjectClass* pcls = world.catalog->find(parent->class_id);
        if (!pcls || !pcls->has(Property::kReceptacle)) {
          problems.push_back(who + ": parent '" + parent->instance_id + "' is not a receptacle");
        } else {
          const bool want_in = pcls->containment == Containment::kIn;
          const bool is_in = obj.location.kind == Location::Kind::kInside;
          if (want_in != is_in) {
            problems.push_back(who + ": link kind does not match '" + parent->instance_id +
                               "' containment");
          }
        }
        break;
      }
    }
    for (Flag f : kAllFlags) {
      if (obj.state.get(f) && !flag_licensed(*cls, f)) {
        problems.push_back(who + ": flag '" + std::string(flag_name(f)) + "' not licensed");
      }
    }
    if (obj.state.get(Flag::kHot) && obj.state.get(Flag::kCold)) {
      problems.push_back(who + ": hot and cold at once");
    }
    if (obj.state.filled_with && !cls->has(Property::kFillable)) {
      problems.push_back(who + ": filled but not fillable");
    }
    if (obj.color_override && cls->has(Property::kDecor)) {
      problems.push_back(who + ": decor objects cannot be recolored");
    }

    // Acyclicity: the parent chain must terminate within |objects| hops.
    const ObjectInstance* cur = &obj;
    size_t hops = 0;
    while (cur && cur->location.has_parent() && hops <= world.objects.size()) {
      cur = world.find(cur->location.parent);
      ++hops;
    }
    if (hops > world.objects.size()) problems.push_back(who + ": containment cycle");
  }
  if (world.agent.held) {
    const ObjectInstance* h = world.find(*world.agent.held);
    if (!h || h->location.kind != Location::Kind::kHeld) {
      problems.push_back("agent holds '" + *world.agent.held + "' which is not held-by-agent");
    }
  }
  if (held_count > 1) problems.push_back("more than one object is held");
  for (Cell c : world.obstacles) {
    if (!occ.in_bounds(c)) problems.push_back("obstacle out of bounds");
  }
  return problems;
}

void validate(const WorldState& world) {
  const auto problems = world_problems(world);
  if (!problems.empty()) throw Error(Errc::kValidationError, problems.front());
}

bool line_of_sight(const Occupancy& occ, Cell from, Cell to) {
  const int nx = std::abs(to.x - from.x);
  const int ny = std::abs(to.y - from.y);
  const int sx = to.x > from.x ? 1 : -1;
  const int sy = to.y > from.y ? 1 : -1;
  Cell cur = from;
  int ix = 0;
  int iy = 0;
  while (ix < nx || iy < ny) {
    // Compare where the segment next crosses a vertical vs. horizontal grid line.
    const long long decision =
        static_cast<long long>(1 + 2 * ix) * ny - static_cast<long long>(1 + 2 * iy) * nx;
    if (decision == 0) {
      cur.x += sx;
      cur.y += sy;
      ++ix;
      ++iy;
    } else if (decision < 0) {
      cur.x += sx;
      ++ix;
    } else {
      cur.y += sy;
      ++iy;
    }
    if (cur != to && occ.blocked(cur)) return false;
  }
  return true;
}

bool within_reach(const Occupancy& occ, Cell agent, Cell target) {
  return chebyshev(agent, target) <= kInteractionRange && line_of_sight(occ, agent, target);
}

namespace {

bool in_cone(RelativeOffset rel, double fov_deg) {
  if (fov_deg >= 360.0) return true;
  if (rel.forward == 0 && rel.right == 0) return true;
  if (fov_deg == 90.0) return rel.forward > 0 && std::abs(rel.right) <= rel.forward;
  const double angle = std::atan2(static_cast<double>(std::abs(rel.right)),
                                  static_cast<double>(rel.forward)) *
                       180.0 / std::numbers::pi;
  return angle <= fov_deg / 2.0 + 1e-9;
}

}  // namespace

std::vector<ObservedObject> symbolic_observation(const WorldState& world, Heading heading,
                                                 double fov_deg, int max_range) {
  std::vector<ObservedObject> out;
  const Occupancy occ = world.occupancy();
  const Cell eye = world.agent.cell;
  for (const auto& [id, obj] : world.objects) {
    if (world.held_root(id) || world.enclosed(id)) continue;
    const Cell pos = world.position(id);
    const int dx = pos.x - eye.x;
    const int dy = pos.y - eye.y;
    if (dx * dx + dy * dy > max_range * max_range) continue;
    if (!in_cone(relative_offset(eye, heading, pos), fov_deg)) continue;
    if (!line_of_sight(occ, eye, pos)) continue;
    ObservedObject seen;
    seen.instance_id = id;
    seen.class_id = obj.class_id;
    seen.bearing_deg = static_cast<int>(std::lround(bearing_deg(eye, heading, pos)));
    seen.distance = std::sqrt(static_cast<double>(dx * dx + dy * dy));
    seen.visible_state_flags = state_badges(obj);
    out.push_back(std::move(seen));
  }
  return out;
}

std::vector<std::string> containment_closure(const WorldState& world, std::string_view id) {
  world.at(id);
  std::vector<std::string> out;
  std::vector<std::string> stack = world.children(id);
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty() && out.size() <= world.objects.size()) {
    std::string cur = std::move(stack.back());
    stack.pop_back();
    auto kids = world.children(cur);
    out.push_back(std::move(cur));
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

}  // namespace arena::scene
