#include <gtest/gtest.h>

#include <deque>
#include <set>

#include "arena/error.hpp"
#include "arena/nav/nav.hpp"
#include "arena/util/rng.hpp"
#include "test_world.hpp"

using namespace arena;
using namespace arena::scene;
using namespace arena::nav;
using arena::testing::add_object;
using arena::testing::empty_world;
using arena::testing::shipped_layout;
using arena::testing::single_room;

namespace {

// Textbook BFS, independent of the A* implementation.
int bfs_cost(const Occupancy& occ, Cell a, Cell b) {
  if (occ.blocked(a) || occ.blocked(b)) return -1;
  std::map<Cell, int> dist{{a, 0}};
  std::deque<Cell> q{a};
  while (!q.empty()) {
    Cell c = q.front();
    q.pop_front();
    if (c == b) return dist[c];
    const Cell next[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (Cell n : next) {
      if (occ.blocked(n) || dist.count(n)) continue;
      dist[n] = dist[c] + 1;
      q.push_back(n);
    }
  }
  return -1;
}

void expect_valid_path(const Occupancy& occ, const Path& p, Cell a, Cell b) {
  ASSERT_FALSE(p.cells.empty());
  EXPECT_EQ(p.cells.front(), a);
  EXPECT_EQ(p.cells.back(), b);
  EXPECT_EQ(static_cast<int>(p.cells.size()) - 1, p.cost);
  for (size_t i = 0; i < p.cells.size(); ++i) {
    EXPECT_FALSE(occ.blocked(p.cells[i]));
    if (i) EXPECT_EQ(manhattan(p.cells[i - 1], p.cells[i]), 1);
  }
}

}  // namespace

TEST(ShortestPath, CorridorDetourAndBlocked) {
  Occupancy corridor(7, 1);
  const Path p = shortest_path(corridor, {0, 0}, {5, 0});
  EXPECT_EQ(p.cost, 5);
  expect_valid_path(corridor, p, {0, 0}, {5, 0});

  Occupancy wall(5, 5);
  for (int y = 0; y < 4; ++y) wall.block({2, y});
  const Path d = shortest_path(wall, {0, 0}, {4, 0});
  EXPECT_EQ(d.cost, bfs_cost(wall, {0, 0}, {4, 0}));
  EXPECT_EQ(d.cost, 12);

  try {
    shortest_path(wall, {0, 0}, {2, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnreachable);
  }
}

TEST(ShortestPath, TieBreakIsFixed) {
  Occupancy open(3, 3);
  const Path p = shortest_path(open, {0, 2}, {2, 0});
  ASSERT_EQ(p.cost, 4);
  // N is tried before E, so the route climbs first.
  EXPECT_EQ(p.cells[1], (Cell{0, 1}));
  EXPECT_EQ(shortest_path(open, {0, 2}, {2, 0}).cells, p.cells);
}

TEST(ShortestPath, MatchesBfsOnRandomGrids) {
  util::Rng rng(99);
  int compared = 0;
  for (int grid = 0; grid < 200; ++grid) {
    Occupancy occ(20, 20);
    for (int y = 0; y < 20; ++y)
      for (int x = 0; x < 20; ++x)
        if (rng.below(100) < 30) occ.block({x, y});
    for (int k = 0; k < 10; ++k) {
      const Cell a{static_cast<int>(rng.below(20)), static_cast<int>(rng.below(20))};
      const Cell b{static_cast<int>(rng.below(20)), static_cast<int>(rng.below(20))};
      const int oracle = bfs_cost(occ, a, b);
      const auto p = find_path(occ, a, b);
      ASSERT_EQ(p.has_value(), oracle >= 0);
      if (!p) continue;
      ++compared;
      EXPECT_EQ(p->cost, oracle);
      expect_valid_path(occ, *p, a, b);
      EXPECT_EQ(find_path(occ, b, a)->cost, p->cost);
    }
  }
  EXPECT_GT(compared, 500);
}

TEST(ShippedLayouts, ViewpointsPairwiseReachable) {
  for (const char* id : {"office_a", "office_b", "lab_c"}) {
    auto layout = shipped_layout(id);
    WorldState w = empty_world(layout, layout->viewpoints.front().cell);
    for (const auto& f : layout->furnishings) add_object(w, f.instance_id, f.class_id, Location::at(f.cell));
    const Occupancy occ = w.occupancy();
    for (const auto& a : layout->viewpoints)
      for (const auto& b : layout->viewpoints)
        EXPECT_TRUE(find_path(occ, a.cell, b.cell).has_value()) << id << " " << a.name << "->" << b.name;
  }
}

TEST(ExecuteNav, GotoViewpointRoomObject) {
  auto layout = shipped_layout("office_a");
  WorldState w = empty_world(layout, {8, 10});
  for (const auto& f : layout->furnishings) add_object(w, f.instance_id, f.class_id, Location::at(f.cell));
  add_object(w, "bowl_1", "bowl", Location::on("table_1"));

  NavOutcome out = execute_nav(w, NavAction::goto_viewpoint("breakroom_vp1"));
  EXPECT_TRUE(out.result.success);
  EXPECT_EQ(out.world.agent.cell, layout->viewpoint("breakroom_vp1")->cell);
  EXPECT_EQ(out.world.tick, w.tick + 1);
  EXPECT_EQ(out.steps_taken, shortest_path(w.occupancy(), w.agent.cell, out.world.agent.cell).cost);

  out = execute_nav(w, NavAction::goto_viewpoint("moon_vp1"));
  EXPECT_EQ(out.result.error_code, affordance::ResultCode::kUnknownViewpoint);
  EXPECT_EQ(out.world.agent, w.agent);

  out = execute_nav(w, NavAction::goto_room("robotics_lab"));
  EXPECT_TRUE(out.result.success);
  EXPECT_EQ(out.world.agent_room(), "robotics_lab");
  EXPECT_EQ(execute_nav(w, NavAction::goto_room("attic")).result.error_code,
            affordance::ResultCode::kUnknownRoom);

  out = execute_nav(w, NavAction::goto_object("bowl_1"));
  EXPECT_TRUE(out.result.success);
  EXPECT_TRUE(within_reach(w.occupancy(), out.world.agent.cell, w.position("bowl_1")));
}

TEST(ExecuteNav, GotoObjectInWalledAreaIsUnreachable) {
  auto layout = single_room({
      ".......",
      "....###",
      "....#..",
      "....#..",
  });
  WorldState w = empty_world(layout, {0, 0});
  add_object(w, "bowl_1", "bowl", Location::at({6, 3}));
  const NavOutcome out = execute_nav(w, NavAction::goto_object("bowl_1"));
  EXPECT_FALSE(out.result.success);
  EXPECT_EQ(out.result.error_code, affordance::ResultCode::kUnreachable);
  WorldState same = w;
  same.tick = out.world.tick;
  EXPECT_TRUE(out.world == same);
}

TEST(ExecuteNav, PrimitivesRotateAndCollide) {
  auto layout = single_room({".....", ".....", "..#..", "....."});
  WorldState w = empty_world(layout, {2, 0}, Heading::kN);
  EXPECT_EQ(execute_nav(w, NavAction::rotate(90)).world.agent.heading, Heading::kE);
  EXPECT_EQ(execute_nav(w, NavAction::rotate(-90)).world.agent.heading, Heading::kW);
  EXPECT_EQ(execute_nav(w, NavAction::rotate(180)).world.agent.heading, Heading::kS);
  EXPECT_FALSE(execute_nav(w, NavAction::rotate(45)).result.success);

  NavOutcome out = execute_nav(w, NavAction::move_backward(3));
  EXPECT_FALSE(out.result.success);
  EXPECT_EQ(out.result.error_code, affordance::ResultCode::kOutOfRange);
  EXPECT_EQ(out.world.agent.cell, (Cell{2, 1}));
  EXPECT_EQ(out.steps_taken, 1);
  EXPECT_EQ(out.world.agent.heading, Heading::kN);

  w.agent.heading = Heading::kE;
  out = execute_nav(w, NavAction::move_forward(2));
  EXPECT_TRUE(out.result.success);
  EXPECT_EQ(out.world.agent.cell, (Cell{4, 0}));
  EXPECT_FALSE(execute_nav(w, NavAction::move_forward(0)).result.success);
}

TEST(LookAround, EmptyRoomAndEastOnly) {
  auto layout = single_room(std::vector<std::string>(5, "....."), {2, 2});
  WorldState w = empty_world(layout, {2, 2}, Heading::kS);
  for (const auto& obs : look_around(w)) EXPECT_TRUE(obs.empty());
  add_object(w, "mug_1", "mug", Location::at({4, 2}));
  const Panorama p = look_around(w);
  EXPECT_TRUE(p[0].empty());
  ASSERT_EQ(p[1].size(), 1u);
  EXPECT_EQ(p[1][0].instance_id, "mug_1");
  EXPECT_TRUE(p[2].empty());
  EXPECT_TRUE(p[3].empty());
  const NavOutcome out = execute_nav(w, NavAction::look_around());
  EXPECT_EQ(out.world.agent.heading, Heading::kS);
  EXPECT_TRUE(out.panorama.has_value());
}

TEST(LookAround, UnionEqualsFullCircleScan) {
  util::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> rows(12, std::string(12, '.'));
    for (auto& r : rows)
      for (auto& ch : r)
        if (rng.below(100) < 15) ch = '#';
    rows[6][6] = '.';
    auto layout = single_room(rows, {6, 6});
    WorldState w = empty_world(layout, {6, 6});
    int n = 0;
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 12; ++x)
        if (rows[y][x] == '.' && rng.below(100) < 20) {
          add_object(w, "obj_" + std::to_string(n++), "apple", Location::at({x, y}));
        }
    std::set<std::string> got;
    for (const auto& obs : look_around(w))
      for (const auto& o : obs) got.insert(o.instance_id);
    std::set<std::string> full;
    for (const auto& o : symbolic_observation(w, Heading::kN, 360.0)) full.insert(o.instance_id);
    EXPECT_EQ(got, full);
  }
}

TEST(ShippedLayouts, FurnishingsAndNotesReachableFromViewpoints) {
  const auto catalog = arena::testing::shipped_catalog();
  for (const char* id : {"office_a", "office_b", "lab_c"}) {
    auto layout = shipped_layout(id);
    WorldState w = empty_world(layout, layout->viewpoints.front().cell);
    for (const auto& f : layout->furnishings) add_object(w, f.instance_id, f.class_id, Location::at(f.cell));
    const Occupancy occ = w.occupancy();
    auto from_some_vp = [&](Cell c) {
      for (const auto& v : layout->viewpoints)
        if (within_reach(occ, v.cell, c)) return true;
      return false;
    };
    for (const auto& f : layout->furnishings) {
      if (catalog->at(f.class_id).has(Property::kDecor)) continue;
      EXPECT_TRUE(from_some_vp(f.cell)) << id << " " << f.instance_id;
    }
    for (const auto& n : layout->sticky_notes) EXPECT_TRUE(from_some_vp(n.cell)) << id << " note";
  }
}
