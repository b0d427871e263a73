#include "arena/metrics/episode.hpp"

#include <algorithm>

#include "arena/error.hpp"
#include "arena/util/files.hpp"

namespace arena::metrics {

EpisodeSummary summarize(const runtime::EpisodeLog& log) {
  return {log.task_type(), log.m(), log.steps_used()};
}

MetricsReport episode_metrics(const std::vector<EpisodeSummary>& episodes) {
  if (episodes.empty()) throw Error(Errc::kEmptyInput, "no episodes to evaluate");
  MetricsReport r;
  r.n_episodes = episodes.size();
  size_t wins = 0;
  long long steps = 0;
  std::map<std::string, long long> task_steps;
  for (const auto& e : episodes) {
    wins += e.m == 1 ? 1 : 0;
    steps += e.steps_used;
    TaskMetrics& t = r.per_task_type[e.task_type];
    ++t.n;
    t.successes += e.m == 1 ? 1 : 0;
    task_steps[e.task_type] += e.steps_used;
  }
  const double n = static_cast<double>(r.n_episodes);
  r.msr = static_cast<double>(wins) / n;
  r.nra = static_cast<double>(steps) / n;
  for (auto& [type, t] : r.per_task_type) {
    t.msr = static_cast<double>(t.successes) / static_cast<double>(t.n);
    t.nra = static_cast<double>(task_steps[type]) / static_cast<double>(t.n);
  }
  return r;
}

MetricsReport episode_metrics(const std::vector<runtime::EpisodeLog>& logs) {
  std::vector<EpisodeSummary> s;
  s.reserve(logs.size());
  for (const auto& l : logs) s.push_back(summarize(l));
  return episode_metrics(s);
}

std::vector<runtime::EpisodeLog> load_logs(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(Errc::kIoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<runtime::EpisodeLog> out;
  for (const auto& p : paths) {
    try {
      out.push_back(runtime::parse_log(util::read_file(p)));
    } catch (const Error& e) {
      throw Error(e.code(), p.string() + ": " + e.detail());
    }
  }
  return out;
}

util::Json report_to_json(const MetricsReport& r) {
  util::Json per = util::Json::object();
  for (const auto& [type, t] : r.per_task_type) {
    per[type.empty() ? "untyped" : type] = {{"n", t.n}, {"successes", t.successes}, {"msr", t.msr}, {"nra", t.nra}};
  }
  return {{"n_episodes", r.n_episodes}, {"msr", r.msr}, {"nra", r.nra}, {"per_task_type", per}};
}

}  // namespace arena::metrics
