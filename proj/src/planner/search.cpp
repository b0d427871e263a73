#include "arena/planner/search.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <unordered_set>

namespace arena::planner {

std::string_view search_mode_name(SearchMode m) { return m == SearchMode::kBfs ? "bfs" : "astar"; }

std::optional<SearchMode> parse_search_mode(std::string_view s) {
  if (s == "bfs") return SearchMode::kBfs;
  if (s == "astar") return SearchMode::kAstar;
  return std::nullopt;
}

namespace {

std::vector<size_t> reachable_operators(const PlanningProblem& p, std::vector<char>& reached) {
  reached.assign(p.fluents.size(), 0);
  for (FluentId f : p.initial) reached[f] = 1;
  std::vector<std::vector<size_t>> watchers(p.fluents.size());
  std::vector<size_t> missing(p.operators.size());
  std::vector<size_t> ready;
  for (size_t i = 0; i < p.operators.size(); ++i) {
    for (FluentId f : p.operators[i].pre) {
      if (!reached[f]) {
        ++missing[i];
        watchers[f].push_back(i);
      }
    }
    if (missing[i] == 0) ready.push_back(i);
  }
  std::vector<char> fired(p.operators.size(), 0);
  while (!ready.empty()) {
    const size_t i = ready.back();
    ready.pop_back();
    if (fired[i]) continue;
    fired[i] = 1;
    for (FluentId f : p.operators[i].add) {
      if (reached[f]) continue;
      reached[f] = 1;
      for (size_t w : watchers[f]) {
        if (--missing[w] == 0) ready.push_back(w);
      }
    }
  }
  std::vector<size_t> out;
  for (size_t i = 0; i < p.operators.size(); ++i) {
    if (fired[i]) out.push_back(i);
  }
  return out;
}

std::vector<size_t> relevance(const PlanningProblem& p, const std::vector<size_t>& reachable) {
  const size_t n = p.fluents.size();
  std::vector<char> initial(n, 0), relevant(n, 0), deleted(n, 0), added(n, 0);
  for (FluentId f : p.initial) initial[f] = 1;
  for (FluentId f : p.goal) relevant[f] = 1;
  const auto handempty = p.find(Fluent{"handempty", {}});
  std::vector<char> chosen(p.operators.size(), 0);

  // A relevant fluent pulls in its achievers, except that an initially true
  // fluent only needs them once something relevant deletes it, and the hand
  // only needs freeing from objects that relevant operators can put in it.
  auto needed = [&](const Operator& op) {
    for (FluentId f : op.add) {
      if (!relevant[f]) continue;
      if (handempty && f == *handempty) {
        bool ok = true;
        for (FluentId q : op.pre) {
          if (p.fluents[q].predicate == "holding") ok = initial[q] || added[q];
        }
        if (ok) return true;
        continue;
      }
      if (initial[f] && !deleted[f]) continue;
      return true;
    }
    return false;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i : reachable) {
      if (chosen[i] || !needed(p.operators[i])) continue;
      chosen[i] = 1;
      changed = true;
      const Operator& op = p.operators[i];
      for (FluentId f : op.pre) relevant[f] = 1;
      for (FluentId f : op.del) deleted[f] = 1;
      for (FluentId f : op.add) added[f] = 1;
    }
  }
  std::vector<size_t> out;
  for (size_t i : reachable) {
    if (chosen[i]) out.push_back(i);
  }
  return out;
}

struct CompiledOp {
  std::vector<uint32_t> pre, add, del;
  size_t source;
};

}  // namespace

std::vector<size_t> relevant_operators(const PlanningProblem& problem) {
  std::vector<char> reached;
  return relevance(problem, reachable_operators(problem, reached));
}

Plan solve(const PlanningProblem& p, const SearchOptions& options) {
  // Goal already satisfied.
  if (std::includes(p.initial.begin(), p.initial.end(), p.goal.begin(), p.goal.end())) return {};

  std::vector<size_t> ops;
  if (options.prune) {
    std::vector<char> reached;
    ops = reachable_operators(p, reached);
    for (FluentId g : p.goal) {
      if (!reached[g]) {
        throw Error(Errc::kUnsolvable, "goal " + p.fluents[g].key() + " is unreachable");
      }
    }
    ops = relevance(p, ops);
  } else {
    for (size_t i = 0; i < p.operators.size(); ++i) ops.push_back(i);
  }

  // Project onto the fluents the kept operators and the goal can observe.
  std::vector<int64_t> slot(p.fluents.size(), -1);
  uint32_t width = 0;
  auto use = [&](FluentId f) {
    if (slot[f] < 0) slot[f] = width++;
  };
  for (FluentId g : p.goal) use(g);
  for (size_t i : ops) {
    for (FluentId f : p.operators[i].pre) use(f);
  }
  if (!options.prune) {
    for (FluentId f = 0; f < p.fluents.size(); ++f) use(f);
  }
  std::vector<CompiledOp> cops;
  for (size_t i : ops) {
    CompiledOp c;
    c.source = i;
    for (FluentId f : p.operators[i].pre) c.pre.push_back(static_cast<uint32_t>(slot[f]));
    for (FluentId f : p.operators[i].add) {
      if (slot[f] >= 0) c.add.push_back(static_cast<uint32_t>(slot[f]));
    }
    for (FluentId f : p.operators[i].del) {
      if (slot[f] >= 0) c.del.push_back(static_cast<uint32_t>(slot[f]));
    }
    cops.push_back(std::move(c));
  }
  std::vector<uint32_t> goal;
  for (FluentId g : p.goal) goal.push_back(static_cast<uint32_t>(slot[g]));

  const size_t words = std::max<size_t>(1, (width + 63) / 64);
  std::vector<uint64_t> pool;
  std::vector<uint32_t> parent, via;
  std::vector<int> depth;
  auto bit = [&](const uint64_t* s, uint32_t b) { return (s[b >> 6] >> (b & 63)) & 1; };

  struct Hash {
    const std::vector<uint64_t>* pool;
    size_t words;
    size_t operator()(uint32_t node) const {
      uint64_t h = 1469598103934665603ull;
      const uint64_t* s = pool->data() + node * words;
      for (size_t i = 0; i < words; ++i) h = (h ^ s[i]) * 1099511628211ull;
      return static_cast<size_t>(h ^ (h >> 29));
    }
  };
  struct Eq {
    const std::vector<uint64_t>* pool;
    size_t words;
    bool operator()(uint32_t a, uint32_t b) const {
      return std::equal(pool->data() + a * words, pool->data() + (a + 1) * words, pool->data() + b * words);
    }
  };
  std::unordered_set<uint32_t, Hash, Eq> seen(1024, Hash{&pool, words}, Eq{&pool, words});

  pool.assign(words, 0);
  for (FluentId f : p.initial) {
    if (slot[f] >= 0) pool[slot[f] >> 6] |= uint64_t{1} << (slot[f] & 63);
  }
  parent.push_back(UINT32_MAX);
  via.push_back(UINT32_MAX);
  depth.push_back(0);
  seen.insert(0);

  auto goal_count = [&](uint32_t node) {
    const uint64_t* s = pool.data() + node * words;
    int missing = 0;
    for (uint32_t g : goal) missing += bit(s, g) ? 0 : 1;
    return missing;
  };
  auto extract = [&](uint32_t node, size_t expanded) {
    Plan plan;
    std::vector<size_t> rev;
    for (uint32_t n = node; parent[n] != UINT32_MAX; n = parent[n]) rev.push_back(cops[via[n]].source);
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
      plan.operators.push_back(p.operators[*it].name);
      plan.steps.push_back(operator_action(p.operators[*it].name));
    }
    plan.cost = static_cast<int>(plan.steps.size());
    plan.expanded = expanded;
    return plan;
  };

  using Entry = std::tuple<int, uint64_t, uint32_t>;  // f, insertion order, node
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  size_t bfs_next = 0;
  uint64_t order = 0;
  if (options.mode == SearchMode::kAstar) open.push({goal_count(0), order++, 0});
  size_t expanded = 0;

  while (true) {
    uint32_t node;
    if (options.mode == SearchMode::kBfs) {
      if (bfs_next >= parent.size()) break;
      node = static_cast<uint32_t>(bfs_next++);
    } else {
      if (open.empty()) break;
      node = std::get<2>(open.top());
      open.pop();
    }
    if (++expanded > options.max_expansions) {
      throw Error(Errc::kBudgetExceeded, "search expanded more than " +
                                             std::to_string(options.max_expansions) + " states");
    }
    for (uint32_t k = 0; k < cops.size(); ++k) {
      const CompiledOp& op = cops[k];
      const uint64_t* s = pool.data() + node * words;
      bool ok = true;
      for (uint32_t b : op.pre) {
        if (!bit(s, b)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const auto child = static_cast<uint32_t>(parent.size());
      pool.insert(pool.end(), pool.begin() + node * words, pool.begin() + (node + 1) * words);
      uint64_t* c = pool.data() + child * words;
      for (uint32_t b : op.del) c[b >> 6] &= ~(uint64_t{1} << (b & 63));
      for (uint32_t b : op.add) c[b >> 6] |= uint64_t{1} << (b & 63);
      if (seen.contains(child)) {
        pool.resize(child * words);
        continue;
      }
      parent.push_back(node);
      via.push_back(k);
      depth.push_back(depth[node] + 1);
      seen.insert(child);
      const int h = goal_count(child);
      if (h == 0) return extract(child, expanded);
      if (options.mode == SearchMode::kAstar) open.push({depth[child] + h, order++, child});
    }
  }
  throw Error(Errc::kUnsolvable, "search space of " + std::to_string(parent.size()) +
                                     " states exhausted without reaching the goal");
}

std::vector<FluentId> simulate(const PlanningProblem& p, const std::vector<std::string>& names) {
  std::vector<char> state(p.fluents.size(), 0);
  for (FluentId f : p.initial) state[f] = 1;
  for (size_t i = 0; i < names.size(); ++i) {
    const Operator* op = p.find_operator(names[i]);
    if (!op) throw Error(Errc::kReplayDivergence, "unknown operator '" + names[i] + "'");
    for (FluentId f : op->pre) {
      if (!state[f]) {
        throw Error(Errc::kReplayDivergence, "step " + std::to_string(i) + " '" + names[i] +
                                                 "' needs " + p.fluents[f].key());
      }
    }
    for (FluentId f : op->del) state[f] = 0;
    for (FluentId f : op->add) state[f] = 1;
  }
  std::vector<FluentId> out;
  for (FluentId f = 0; f < p.fluents.size(); ++f) {
    if (state[f]) out.push_back(f);
  }
  return out;
}

namespace {

BatchResult plan_one(const PlanningProblem& p, const SearchOptions& options) {
  BatchResult r;
  try {
    r.plan = solve(p, options);
  } catch (const Error& e) {
    r.error = e.code();
    r.message = e.what();
  }
  return r;
}

}  // namespace

std::vector<BatchResult> plan_batch(const std::vector<PlanningProblem>& problems,
                                    const SearchOptions& options) {
  std::vector<BatchResult> out(problems.size());
  const auto n = static_cast<int64_t>(problems.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t i = 0; i < n; ++i) out[i] = plan_one(problems[i], options);
  return out;
}

std::vector<BatchResult> plan_batch_serial(const std::vector<PlanningProblem>& problems,
                                           const SearchOptions& options) {
  std::vector<BatchResult> out;
  out.reserve(problems.size());
  for (const auto& p : problems) out.push_back(plan_one(p, options));
  return out;
}

}  // namespace arena::planner
