#include "arena/nav/nav.hpp"

#include <deque>
#include <queue>
#include <tuple>

#include "arena/error.hpp"

namespace arena::nav {

using affordance::ActionResult;
using affordance::ResultCode;
using scene::Cell;
using scene::Heading;
using scene::Occupancy;
using scene::WorldState;

namespace {

constexpr std::array<std::string_view, 7> kKindNames = {
    "GotoViewpoint", "GotoRoom", "GotoObject", "MoveForward", "MoveBackward", "Rotate", "LookAround",
};

constexpr std::array<Heading, 4> kOrder = {Heading::kN, Heading::kE, Heading::kS, Heading::kW};

size_t index_of(const Occupancy& occ, Cell c) {
  return static_cast<size_t>(c.y) * occ.width() + c.x;
}

Heading final_heading(const Path& path, Heading fallback) {
  if (path.cells.size() < 2) return fallback;
  const Cell a = path.cells[path.cells.size() - 2];
  const Cell b = path.cells.back();
  return scene::heading_towards(a, b, fallback);
}

NavOutcome failed(const WorldState& world, ResultCode code, std::string msg) {
  NavOutcome out{world, ActionResult::fail(code, std::move(msg)), 0, std::nullopt};
  ++out.world.tick;
  return out;
}

NavOutcome moved_along(const WorldState& world, const Path& path, Heading heading, std::string msg) {
  NavOutcome out{world, ActionResult::ok(std::move(msg)), path.cost, std::nullopt};
  out.world.agent.cell = path.cells.back();
  out.world.agent.heading = heading;
  ++out.world.tick;
  return out;
}

}  // namespace

bool NavAction::well_formed() const {
  switch (kind) {
    case Kind::kMoveForward:
    case Kind::kMoveBackward: return amount >= 1;
    case Kind::kRotate: return amount != 0 && amount % 90 == 0 && amount > -360 && amount < 360;
    case Kind::kGotoViewpoint:
    case Kind::kGotoRoom:
    case Kind::kGotoObject: return !name.empty();
    case Kind::kLookAround: return true;
  }
  return false;
}

std::string_view nav_kind_name(NavAction::Kind k) { return kKindNames[static_cast<size_t>(k)]; }

std::optional<NavAction::Kind> parse_nav_kind(std::string_view name) {
  for (size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<NavAction::Kind>(i);
  }
  return std::nullopt;
}

std::optional<Path> find_path(const Occupancy& occ, Cell from, Cell to) {
  if (occ.blocked(from) || occ.blocked(to)) return std::nullopt;
  const size_t n = static_cast<size_t>(occ.width()) * occ.height();
  std::vector<int> g(n, -1);
  std::vector<int> parent(n, -1);
  std::vector<uint8_t> closed(n, 0);
  // (f, discovery counter, cell index) keeps ties deterministic.
  using Entry = std::tuple<int, uint64_t, size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  uint64_t counter = 0;
  const size_t start = index_of(occ, from);
  const size_t goal = index_of(occ, to);
  g[start] = 0;
  open.emplace(scene::manhattan(from, to), counter++, start);
  while (!open.empty()) {
    const auto [f, order, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == goal) break;
    const Cell c{static_cast<int>(idx % occ.width()), static_cast<int>(idx / occ.width())};
    for (Heading h : kOrder) {
      const Cell nb = scene::step(c, h);
      if (occ.blocked(nb)) continue;
      const size_t ni = index_of(occ, nb);
      const int ng = g[idx] + 1;
      if (closed[ni] || (g[ni] >= 0 && g[ni] <= ng)) continue;
      g[ni] = ng;
      parent[ni] = static_cast<int>(idx);
      open.emplace(ng + scene::manhattan(nb, to), counter++, ni);
    }
  }
  if (!closed[goal]) return std::nullopt;
  Path p;
  p.cost = g[goal];
  for (int at = static_cast<int>(goal); at >= 0; at = parent[at]) {
    p.cells.push_back({at % occ.width(), at / occ.width()});
    if (static_cast<size_t>(at) == start) break;
  }
  std::reverse(p.cells.begin(), p.cells.end());
  return p;
}

Path shortest_path(const Occupancy& occ, Cell from, Cell to) {
  auto p = find_path(occ, from, to);
  if (!p) {
    throw Error(Errc::kUnreachable, "no path from (" + std::to_string(from.x) + "," +
                                        std::to_string(from.y) + ") to (" + std::to_string(to.x) +
                                        "," + std::to_string(to.y) + ")");
  }
  return *p;
}

std::vector<int> distance_field(const Occupancy& occ, Cell from) {
  std::vector<int> dist(static_cast<size_t>(occ.width()) * occ.height(), -1);
  if (occ.blocked(from)) return dist;
  std::deque<Cell> q{from};
  dist[index_of(occ, from)] = 0;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    for (Heading h : kOrder) {
      const Cell nb = scene::step(c, h);
      if (occ.blocked(nb) || dist[index_of(occ, nb)] >= 0) continue;
      dist[index_of(occ, nb)] = dist[index_of(occ, c)] + 1;
      q.push_back(nb);
    }
  }
  return dist;
}

Panorama look_around(const WorldState& world) {
  Panorama out;
  for (Heading h : kOrder) out[static_cast<size_t>(h)] = scene::symbolic_observation(world, h);
  return out;
}

const scene::Viewpoint* nearest_viewpoint(const WorldState& world, std::string_view room, Cell from) {
  const Occupancy occ = world.occupancy();
  const std::vector<int> dist = distance_field(occ, from);
  const scene::Viewpoint* best = nullptr;
  int best_cost = -1;
  for (const scene::Viewpoint* vp : world.layout->viewpoints_in(room)) {
    if (occ.blocked(vp->cell)) continue;
    const int d = dist[index_of(occ, vp->cell)];
    if (d < 0) continue;
    if (!best || d < best_cost || (d == best_cost && vp->name < best->name)) {
      best = vp;
      best_cost = d;
    }
  }
  return best;
}

NavOutcome execute_nav(const WorldState& world, const NavAction& action) {
  using K = NavAction::Kind;
  if (!action.well_formed()) return failed(world, ResultCode::kUnsupported, "malformed navigation action");
  const Occupancy occ = world.occupancy();
  const Cell here = world.agent.cell;
  const std::string kind(nav_kind_name(action.kind));

  switch (action.kind) {
    case K::kGotoViewpoint: {
      const scene::Viewpoint* vp = world.layout->viewpoint(action.name);
      if (!vp) return failed(world, ResultCode::kUnknownViewpoint, "unknown viewpoint '" + action.name + "'");
      auto path = find_path(occ, here, vp->cell);
      if (!path) return failed(world, ResultCode::kUnreachable, "viewpoint '" + action.name + "' is unreachable");
      return moved_along(world, *path, final_heading(*path, world.agent.heading), kind + " " + action.name);
    }
    case K::kGotoRoom: {
      if (!world.layout->room(action.name)) {
        return failed(world, ResultCode::kUnknownRoom, "unknown room '" + action.name + "'");
      }
      const scene::Viewpoint* vp = nearest_viewpoint(world, action.name, here);
      if (!vp) return failed(world, ResultCode::kUnreachable, "room '" + action.name + "' is unreachable");
      const Path path = shortest_path(occ, here, vp->cell);
      return moved_along(world, path, final_heading(path, world.agent.heading), kind + " " + action.name);
    }
    case K::kGotoObject: {
      if (!world.find(action.name)) {
        return failed(world, ResultCode::kUnknownInstance, "unknown instance '" + action.name + "'");
      }
      if (world.held_root(action.name)) {
        return failed(world, ResultCode::kUnreachable, "'" + action.name + "' is in the agent's hand");
      }
      const Cell target = world.position(action.name);
      const std::vector<int> dist = distance_field(occ, here);
      std::optional<Cell> best;
      int best_cost = -1;
      for (int y = 0; y < occ.height(); ++y) {
        for (int x = 0; x < occ.width(); ++x) {
          const Cell c{x, y};
          const int d = dist[index_of(occ, c)];
          if (d < 0 || !scene::within_reach(occ, c, target)) continue;
          if (!best || d < best_cost) {
            best = c;
            best_cost = d;
          }
        }
      }
      if (!best) return failed(world, ResultCode::kUnreachable, "'" + action.name + "' is unreachable");
      const Path path = shortest_path(occ, here, *best);
      return moved_along(world, path, scene::heading_towards(*best, target, final_heading(path, world.agent.heading)),
                         kind + " " + action.name);
    }
    case K::kMoveForward:
    case K::kMoveBackward: {
      const Heading dir = action.kind == K::kMoveForward ? world.agent.heading
                                                         : scene::rotate(world.agent.heading, 2);
      NavOutcome out{world, ActionResult::ok(kind), 0, std::nullopt};
      Cell cur = here;
      for (int i = 0; i < action.amount; ++i) {
        const Cell next = scene::step(cur, dir);
        if (occ.blocked(next)) {
          out.result = ActionResult::fail(ResultCode::kOutOfRange,
                                          "blocked after " + std::to_string(out.steps_taken) + " of " +
                                              std::to_string(action.amount) + " cells");
          break;
        }
        cur = next;
        ++out.steps_taken;
      }
      out.world.agent.cell = cur;
      ++out.world.tick;
      return out;
    }
    case K::kRotate: {
      NavOutcome out{world, ActionResult::ok(kind), 0, std::nullopt};
      out.world.agent.heading = scene::rotate(world.agent.heading, action.amount / 90);
      ++out.world.tick;
      return out;
    }
    case K::kLookAround: {
      NavOutcome out{world, ActionResult::ok(kind), 0, look_around(world)};
      ++out.world.tick;
      return out;
    }
  }
  return failed(world, ResultCode::kUnsupported, "unknown navigation action");
}

}  // namespace arena::nav
