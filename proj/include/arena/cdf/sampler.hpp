#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/cdf/cdf.hpp"

namespace arena::cdf {

enum class TaskType : uint8_t {
  kPickupDeliver,
  kHeatDeliver,
  kFreezeDeliver,
  kRepairDeliver,
  kFillDeliver,
  kColorDeliver,
  kCleanDeliver,
  kPourContainer,
  kBreakObject,
  kInsertInDevice,
  kToggleDevice,
  kScanObject,
};

inline constexpr std::array<TaskType, 12> kAllTaskTypes = {
    TaskType::kPickupDeliver, TaskType::kHeatDeliver,  TaskType::kFreezeDeliver,
    TaskType::kRepairDeliver, TaskType::kFillDeliver,  TaskType::kColorDeliver,
    TaskType::kCleanDeliver,  TaskType::kPourContainer, TaskType::kBreakObject,
    TaskType::kInsertInDevice, TaskType::kToggleDevice, TaskType::kScanObject,
};

// "heat&deliver", "pourContainer", ...
std::string_view task_type_name(TaskType t);
std::optional<TaskType> parse_task_type(std::string_view name);
// Identifier-safe form used in cdf ids: "heat_deliver", "pour_container".
std::string task_slug(TaskType t);

// Unset parameters are drawn per mission.
struct MissionTemplate {
  TaskType type = TaskType::kPickupDeliver;
  std::optional<std::string> target_class;
  std::optional<std::string> receptacle_class;  // deliver surface or insert device
  std::optional<std::string> device_class;      // toggleDevice
  std::optional<std::string> color;
  std::optional<std::string> liquid;
};

std::vector<MissionTemplate> default_pool(const std::vector<TaskType>& types = {kAllTaskTypes.begin(),
                                                                               kAllTaskTypes.end()});

struct SampleOptions {
  uint64_t seed = 0;
  size_t n = 1;
  // Leave exactly one tool able to produce the state change.
  bool unique_tool = false;
  std::vector<std::string> layouts;  // empty means every loaded layout
  size_t max_attempts = 64;
  // Extra acceptance test per draw, e.g. a planner run. Rejected draws are
  // retried with the same mission stream.
  std::function<bool(const CDF&)> accept;
};

// Mission i uses pool[i % pool.size()] and its own RNG stream derived from
// (seed, i), so output i depends only on the seed, the template and i.
// Throws GenerationExhausted when a mission cannot be placed.
std::vector<CDF> sample_missions(const std::vector<MissionTemplate>& pool, const Resources& res,
                                 const SampleOptions& options);

}  // namespace arena::cdf
