#pragma once

#include <string>
#include <vector>

#include "missions.hpp"

// Small missions on the "mini" fixture layout, shared by the planner tests and
// the acceptance run.
namespace arena::testing::fixtures {

util::Json on(const std::string& id, const std::string& cls, const std::string& parent);
util::Json in(const std::string& id, const std::string& cls, const std::string& parent);
util::Json state_is(const std::string& obj, const std::string& flag, bool value = true);
util::Json located(const std::string& obj, const std::string& rec);

struct Fixture {
  std::string name;
  MissionSpec spec;
};

// Bowl on the table to be heated and left there. Blocking cell {5,3} cuts
// off the laser room.
MissionSpec heat_deliver();
std::vector<Fixture> mini_fixtures();

}  // namespace arena::testing::fixtures
