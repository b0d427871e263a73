#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "arena/util/json.hpp"

namespace arena::metrics {

// Pixel box: [x, x+w) x [y, y+h).
struct Box {
  double x = 0, y = 0, w = 0, h = 0;
};

// Row-major run lengths over a height x width bitmap, alternating
// background/foreground and starting with background (possibly 0).
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<uint32_t> counts;
};

Mask encode_mask(int height, int width, const std::vector<uint8_t>& bits);
std::vector<uint8_t> decode_mask(const Mask& m);  // throws ValidationError

using Region = std::variant<Box, Mask>;

double region_area(const Region& r);
// |A n B| / |A u B|; 0 when both are empty. Throws KindMismatch for a box
// against a mask and ValidationError for masks of different sizes.
double iou(const Region& a, const Region& b);

struct Instance {
  std::string cls;
  double score = 1.0;  // detections only
  Region region;
  double area = 0.0;   // explicit, or the region's area
};

struct Image {
  std::string image_id;
  std::vector<Instance> instances;
};

using InstanceSet = std::vector<Image>;

// {"images": [{"image_id", "instances": [{"class", "score"?, "box" | "mask",
// "area"?}]}]}. Scores are required for detections and must lie in [0,1].
InstanceSet parse_instances(std::string_view text, bool detections);
InstanceSet parse_instances_json(const util::Json& doc, bool detections);
util::Json instances_to_json(const InstanceSet& set, bool detections);

struct AreaBand {
  std::string name;
  double lo = 0;
  double hi = 0;  // exclusive; the last band is open-ended
};

struct DetectionMetricConfig {
  std::vector<double> coco_iou_thresholds;  // 0.50 .. 0.95
  std::vector<double> tmap_score_thresholds = {0.05, 0.1, 0.3, 0.5, 0.7};
  std::vector<double> tmap_iou_thresholds = {0.1, 0.3, 0.4, 0.5, 0.75, 0.8};
  size_t max_detections = 100;
  std::vector<AreaBand> area_bands = {{"small", 0, 1296}, {"medium", 1296, 9216}, {"large", 9216, 0}};

  DetectionMetricConfig();
};

bool in_band(const AreaBand& band, double area, bool last);

struct CocoResult {
  std::optional<double> overall;  // nullopt when the ground truth is empty
  std::map<std::string, double> per_class;
  std::map<std::string, std::optional<double>> per_band;
};

struct TmapResult {
  double overall = 0.0;
  std::map<std::string, double> per_band;
  std::vector<double> combinations;  // score-major, one per (score, IoU)
};

// Per-class work fans out over OpenMP threads when `parallel`; the reduction
// runs in class order either way.
CocoResult coco_map(const InstanceSet& gt, const InstanceSet& det, const DetectionMetricConfig& cfg = {},
                    bool parallel = true);
TmapResult t_map(const InstanceSet& gt, const InstanceSet& det, const DetectionMetricConfig& cfg = {});

util::Json coco_to_json(const CocoResult& r);
util::Json tmap_to_json(const TmapResult& r);

}  // namespace arena::metrics
