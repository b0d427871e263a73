#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arena/cdf/sampler.hpp"
#include "arena/planner/search.hpp"
#include "arena/resources.hpp"

namespace arena::cli {

struct GenOptions {
  uint64_t seed = 0;
  size_t n = 1;  // per task type
  std::vector<cdf::TaskType> types{cdf::kAllTaskTypes.begin(), cdf::kAllTaskTypes.end()};
  bool unique_tool = false;
  std::filesystem::path out;
};

// Writes <out>/<cdf_id>.json per mission plus <out>/index.json; returns the
// ids in generation order.
std::vector<std::string> gen_missions(const GenOptions& o, const Resources& res);

struct PlanOptions {
  planner::SearchOptions search;
  std::optional<std::filesystem::path> pddl_out;  // directory
  std::optional<std::filesystem::path> log_out;   // file for one CDF, directory for many
  bool parallel = true;
};

struct PlanReport {
  std::string cdf_id;
  bool ok = false;
  int cost = 0;
  int m = 0;
  std::string error;
  std::vector<std::string> steps;  // action labels
  std::string log;
};

// `cdf` is a CDF file or a directory of them (index.json is skipped).
std::vector<PlanReport> plan(const std::filesystem::path& cdf, const PlanOptions& o, const Resources& res);

// Accepts the display form ("heat&deliver") or the slug ("heat_deliver").
std::optional<cdf::TaskType> task_type_from_string(std::string_view s);

// Whole command line. Usage errors give 2, failures 1 with a diagnostic on err.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace arena::cli
