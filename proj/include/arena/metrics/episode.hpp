#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "arena/runtime/episode_log.hpp"
#include "arena/util/json.hpp"

namespace arena::metrics {

struct EpisodeSummary {
  std::string task_type;
  int m = 0;
  int steps_used = 0;
};

struct TaskMetrics {
  size_t n = 0;
  size_t successes = 0;
  double msr = 0.0;
  double nra = 0.0;
};

struct MetricsReport {
  size_t n_episodes = 0;
  double msr = 0.0;
  double nra = 0.0;  // over every episode, failed ones included
  std::map<std::string, TaskMetrics> per_task_type;  // "" keys untyped missions
};

EpisodeSummary summarize(const runtime::EpisodeLog& log);
// Throws EmptyInput.
MetricsReport episode_metrics(const std::vector<EpisodeSummary>& episodes);
MetricsReport episode_metrics(const std::vector<runtime::EpisodeLog>& logs);

// Every *.jsonl under `dir`, in path order. Throws IoError / ParseError.
std::vector<runtime::EpisodeLog> load_logs(const std::filesystem::path& dir);

util::Json report_to_json(const MetricsReport& r);

}  // namespace arena::metrics
