#pragma once

#include <optional>
#include <vector>

#include "arena/action.hpp"
#include "arena/cdf/cdf.hpp"
#include "arena/resources.hpp"

namespace arena::testing {

// Breadth-first search over concrete world states using the engine and the
// navigator directly: GotoViewpoint to every viewpoint plus every applicable
// interaction. Tick and heading are ignored when deduplicating. Returns the
// shortest action sequence, or nullopt when none exists within max_depth.
std::optional<std::vector<Action>> engine_bfs(const cdf::CDF& cdf, const Resources& res,
                                              int max_depth);

// Runs actions through the engine and navigator, failing fast; returns the
// final world or throws ReplayDivergence at the first failed step.
scene::WorldState execute(const scene::WorldState& start, const std::vector<Action>& actions,
                          const Resources& res);

}  // namespace arena::testing
