#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/action.hpp"
#include "arena/error.hpp"
#include "arena/planner/problem.hpp"

namespace arena::planner {

enum class SearchMode { kBfs, kAstar };

std::string_view search_mode_name(SearchMode m);
std::optional<SearchMode> parse_search_mode(std::string_view s);

struct SearchOptions {
  SearchMode mode = SearchMode::kBfs;
  size_t max_expansions = 4'000'000;
  // Reachability and relevance pruning; off only for oracle runs.
  bool prune = true;
};

struct Plan {
  std::vector<std::string> operators;
  std::vector<Action> steps;
  int cost = 0;
  size_t expanded = 0;
};

// Unit-cost BFS is optimal; A* uses the goal-count heuristic and may not be.
// Successors are generated in operator-name order and the goal is tested at
// generation. Throws Unsolvable or BudgetExceeded.
Plan solve(const PlanningProblem& problem, const SearchOptions& options = {});

// Indices of operators kept by forward reachability and backward relevance.
std::vector<size_t> relevant_operators(const PlanningProblem& problem);

// Replays operator names symbolically; returns the final fluent set or throws
// ReplayDivergence when a precondition does not hold.
std::vector<FluentId> simulate(const PlanningProblem& problem, const std::vector<std::string>& ops);

struct BatchResult {
  std::optional<Plan> plan;
  std::optional<Errc> error;
  std::string message;
};

// Independent searches spread over OpenMP threads; results are in input order
// and identical to plan_batch_serial.
std::vector<BatchResult> plan_batch(const std::vector<PlanningProblem>& problems,
                                    const SearchOptions& options = {});
std::vector<BatchResult> plan_batch_serial(const std::vector<PlanningProblem>& problems,
                                           const SearchOptions& options = {});

}  // namespace arena::planner
