#include "arena/metrics/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "arena/error.hpp"

namespace arena::metrics {

using util::Json;

Mask encode_mask(int height, int width, const std::vector<uint8_t>& bits) {
  if (bits.size() != static_cast<size_t>(height) * static_cast<size_t>(width)) {
    throw Error(Errc::kValidationError, "mask bits do not match its size");
  }
  Mask m{height, width, {}};
  uint8_t cur = 0;
  uint32_t run = 0;
  for (uint8_t b : bits) {
    const uint8_t v = b ? 1 : 0;
    if (v != cur) {
      m.counts.push_back(run);
      run = 0;
      cur = v;
    }
    ++run;
  }
  m.counts.push_back(run);
  return m;
}

std::vector<uint8_t> decode_mask(const Mask& m) {
  if (m.height < 0 || m.width < 0) throw Error(Errc::kValidationError, "mask size must be non-negative");
  const size_t total = static_cast<size_t>(m.height) * static_cast<size_t>(m.width);
  std::vector<uint8_t> bits;
  bits.reserve(total);
  uint8_t v = 0;
  for (uint32_t run : m.counts) {
    if (bits.size() + run > total) throw Error(Errc::kValidationError, "mask runs exceed its size");
    bits.insert(bits.end(), run, v);
    v ^= 1;
  }
  if (bits.size() != total) throw Error(Errc::kValidationError, "mask runs do not cover its size");
  return bits;
}

namespace {

double mask_area(const Mask& m) {
  double a = 0;
  for (size_t i = 1; i < m.counts.size(); i += 2) a += m.counts[i];
  return a;
}

}  // namespace

double region_area(const Region& r) {
  if (const Box* b = std::get_if<Box>(&r)) return b->w * b->h;
  return mask_area(std::get<Mask>(r));
}

double iou(const Region& a, const Region& b) {
  if (a.index() != b.index()) throw Error(Errc::kKindMismatch, "cannot compare a box with a mask");
  if (const Box* x = std::get_if<Box>(&a)) {
    const Box& y = std::get<Box>(b);
    const double iw = std::max(0.0, std::min(x->x + x->w, y.x + y.w) - std::max(x->x, y.x));
    const double ih = std::max(0.0, std::min(x->y + x->h, y.y + y.h) - std::max(x->y, y.y));
    const double inter = iw * ih;
    const double uni = x->w * x->h + y.w * y.h - inter;
    return uni > 0 ? inter / uni : 0.0;
  }
  const Mask& ma = std::get<Mask>(a);
  const Mask& mb = std::get<Mask>(b);
  if (ma.height != mb.height || ma.width != mb.width) {
    throw Error(Errc::kValidationError, "masks differ in size");
  }
  const auto ba = decode_mask(ma);
  const auto bb = decode_mask(mb);
  size_t inter = 0, uni = 0;
  for (size_t i = 0; i < ba.size(); ++i) {
    inter += ba[i] & bb[i];
    uni += ba[i] | bb[i];
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

namespace {

Region parse_region(util::FieldReader& r) {
  const Json* box = r.find("box");
  const Json* mask = r.find("mask");
  if ((box != nullptr) == (mask != nullptr)) {
    throw Error(Errc::kValidationError, r.where() + ": needs exactly one of box, mask");
  }
  if (box) {
    if (!box->is_array() || box->size() != 4 ||
        !std::all_of(box->begin(), box->end(), [](const Json& v) { return v.is_number(); })) {
      throw Error(Errc::kValidationError, r.path("box") + ": expected [x, y, w, h]");
    }
    Box b{(*box)[0].get<double>(), (*box)[1].get<double>(), (*box)[2].get<double>(), (*box)[3].get<double>()};
    if (!(b.w >= 0) || !(b.h >= 0) || !std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
        !std::isfinite(b.h)) {
      throw Error(Errc::kValidationError, r.path("box") + ": width and height must be finite and non-negative");
    }
    return b;
  }
  util::FieldReader m(*mask, r.path("mask"));
  const Json& size = m.required_array("size");
  if (size.size() != 2 || !size[0].is_number_unsigned() || !size[1].is_number_unsigned()) {
    throw Error(Errc::kValidationError, m.path("size") + ": expected [height, width]");
  }
  Mask out;
  out.height = size[0].get<int>();
  out.width = size[1].get<int>();
  for (const auto& c : m.required_array("counts")) {
    if (!c.is_number_unsigned()) throw Error(Errc::kValidationError, m.path("counts") + ": expected non-negative integers");
    out.counts.push_back(c.get<uint32_t>());
  }
  m.reject_unknown();
  decode_mask(out);
  return out;
}

}  // namespace

InstanceSet parse_instances_json(const Json& doc, bool detections) {
  const std::string root_name = detections ? "det" : "gt";
  util::FieldReader root(doc, root_name);
  InstanceSet out;
  std::set<std::string> ids;
  const Json& images = root.required_array("images");
  for (size_t i = 0; i < images.size(); ++i) {
    util::FieldReader im(images[i], root_name + ".images[" + std::to_string(i) + "]");
    Image img;
    img.image_id = im.required_string("image_id");
    if (!ids.insert(img.image_id).second) throw Error(Errc::kValidationError, im.path("image_id") + ": duplicate image");
    const Json& list = im.required_array("instances");
    for (size_t k = 0; k < list.size(); ++k) {
      util::FieldReader r(list[k], im.path("instances") + "[" + std::to_string(k) + "]");
      Instance inst;
      inst.cls = r.required_string("class");
      if (detections) {
        const Json& s = r.required("score");
        if (!s.is_number()) throw Error(Errc::kValidationError, r.path("score") + ": expected a number");
        inst.score = s.get<double>();
        if (!(inst.score >= 0.0 && inst.score <= 1.0)) {
          throw Error(Errc::kValidationError, r.path("score") + ": must lie in [0, 1]");
        }
      }
      inst.region = parse_region(r);
      inst.area = r.optional_number("area").value_or(region_area(inst.region));
      if (!(inst.area >= 0.0) || !std::isfinite(inst.area)) {
        throw Error(Errc::kValidationError, r.path("area") + ": must be finite and non-negative");
      }
      r.reject_unknown();
      img.instances.push_back(std::move(inst));
    }
    im.reject_unknown();
    out.push_back(std::move(img));
  }
  root.reject_unknown();
  return out;
}

InstanceSet parse_instances(std::string_view text, bool detections) {
  return parse_instances_json(util::parse_json(text, detections ? "det" : "gt"), detections);
}

Json instances_to_json(const InstanceSet& set, bool detections) {
  Json images = Json::array();
  for (const auto& img : set) {
    Json list = Json::array();
    for (const auto& inst : img.instances) {
      Json j = {{"class", inst.cls}, {"area", inst.area}};
      if (detections) j["score"] = inst.score;
      if (const Box* b = std::get_if<Box>(&inst.region)) {
        j["box"] = {b->x, b->y, b->w, b->h};
      } else {
        const Mask& m = std::get<Mask>(inst.region);
        j["mask"] = {{"size", {m.height, m.width}}, {"counts", m.counts}};
      }
      list.push_back(std::move(j));
    }
    images.push_back({{"image_id", img.image_id}, {"instances", std::move(list)}});
  }
  return {{"images", std::move(images)}};
}

DetectionMetricConfig::DetectionMetricConfig() {
  // k/20 keeps 0.6 and friends bit-equal to their literals.
  for (int k = 10; k <= 19; ++k) coco_iou_thresholds.push_back(k / 20.0);
}

bool in_band(const AreaBand& band, double area, bool last) {
  return area >= band.lo && (last || area < band.hi);
}

namespace {

// GT and capped detections of one class in one image, indices into the
// image's instance list.
struct Cell {
  std::vector<size_t> gt;
  std::vector<size_t> det;  // by descending score, stable
};

struct Prepared {
  std::vector<std::string> classes;           // sorted, union of GT and detections
  std::vector<const Image*> gt_images;        // aligned with det_images; may be null
  std::vector<const Image*> det_images;
  std::vector<std::vector<Cell>> cells;       // [class][image]
};

Prepared prepare(const InstanceSet& gt, const InstanceSet& det, size_t max_det) {
  Prepared p;
  std::map<std::string, size_t> image_index;
  auto slot = [&](const std::string& id) {
    auto [it, fresh] = image_index.emplace(id, p.gt_images.size());
    if (fresh) {
      p.gt_images.push_back(nullptr);
      p.det_images.push_back(nullptr);
    }
    return it->second;
  };
  for (const auto& img : gt) p.gt_images[slot(img.image_id)] = &img;
  for (const auto& img : det) p.det_images[slot(img.image_id)] = &img;
  std::set<std::string> classes;
  for (const auto& img : gt) for (const auto& i : img.instances) classes.insert(i.cls);
  for (const auto& img : det) for (const auto& i : img.instances) classes.insert(i.cls);
  p.classes.assign(classes.begin(), classes.end());
  std::map<std::string, size_t> cls_index;
  for (size_t c = 0; c < p.classes.size(); ++c) cls_index[p.classes[c]] = c;
  p.cells.assign(p.classes.size(), std::vector<Cell>(p.gt_images.size()));
  for (size_t im = 0; im < p.gt_images.size(); ++im) {
    if (const Image* g = p.gt_images[im]) {
      for (size_t k = 0; k < g->instances.size(); ++k) p.cells[cls_index[g->instances[k].cls]][im].gt.push_back(k);
    }
    if (const Image* d = p.det_images[im]) {
      std::vector<size_t> order(d->instances.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](size_t a, size_t b) { return d->instances[a].score > d->instances[b].score; });
      if (order.size() > max_det) order.resize(max_det);
      for (size_t k : order) p.cells[cls_index[d->instances[k].cls]][im].det.push_back(k);
    }
  }
  return p;
}

enum class Outcome : uint8_t { kTp, kFp, kIgnored };

// Greedy COCO matching of one (class, image) cell at one threshold. Returns an
// outcome per detection (in cell order) and the count of non-ignored GT.
std::vector<Outcome> match_cell(const Cell& cell, const Image* g, const Image* d, double thr,
                                const AreaBand* band, bool last_band, double min_score, size_t& n_gt) {
  std::vector<size_t> gts = cell.gt;
  std::vector<uint8_t> ignore(gts.size(), 0);
  if (band) {
    for (size_t i = 0; i < gts.size(); ++i) ignore[i] = in_band(*band, g->instances[gts[i]].area, last_band) ? 0 : 1;
  }
  // Non-ignored ground truth first, stable.
  std::vector<size_t> order(gts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return ignore[a] < ignore[b]; });
  for (size_t i = 0; i < gts.size(); ++i) n_gt += ignore[i] ? 0 : 1;

  std::vector<uint8_t> taken(gts.size(), 0);
  std::vector<Outcome> out;
  for (size_t di : cell.det) {
    const Instance& det = d->instances[di];
    if (det.score < min_score) continue;
    int best = -1;
    double best_iou = 0.0;
    for (size_t oi : order) {
      if (taken[oi]) continue;
      if (best >= 0 && !ignore[static_cast<size_t>(best)] && ignore[oi]) break;
      const double v = iou(det.region, g->instances[gts[oi]].region);
      if (v < thr) continue;
      if (best < 0 || v > best_iou) {
        best = static_cast<int>(oi);
        best_iou = v;
      }
    }
    if (best >= 0) {
      taken[static_cast<size_t>(best)] = 1;
      out.push_back(ignore[static_cast<size_t>(best)] ? Outcome::kIgnored : Outcome::kTp);
    } else if (band && !in_band(*band, det.area, last_band)) {
      out.push_back(Outcome::kIgnored);
    } else {
      out.push_back(Outcome::kFp);
    }
  }
  return out;
}

// 101-point interpolated AP for one class, or nullopt without ground truth.
std::optional<double> average_precision(const Prepared& p, size_t c, double thr, const AreaBand* band,
                                        bool last_band) {
  struct Scored {
    double score;
    bool tp;
  };
  std::vector<Scored> all;
  size_t n_gt = 0;
  for (size_t im = 0; im < p.gt_images.size(); ++im) {
    const Cell& cell = p.cells[c][im];
    if (cell.det.empty()) {
      const Image* g = p.gt_images[im];
      for (size_t k : cell.gt) {
        if (!band || in_band(*band, g->instances[k].area, last_band)) ++n_gt;
      }
      continue;
    }
    const auto res = match_cell(cell, p.gt_images[im], p.det_images[im], thr, band, last_band, -1.0, n_gt);
    for (size_t k = 0; k < res.size(); ++k) {
      if (res[k] == Outcome::kIgnored) continue;
      all.push_back({p.det_images[im]->instances[cell.det[k]].score, res[k] == Outcome::kTp});
    }
  }
  if (n_gt == 0) return std::nullopt;
  std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
  std::vector<double> rc(all.size()), pr(all.size());
  double tp = 0, fp = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    (all[i].tp ? tp : fp) += 1;
    rc[i] = tp / static_cast<double>(n_gt);
    pr[i] = tp / (tp + fp);
  }
  for (size_t i = pr.size(); i-- > 1;) pr[i - 1] = std::max(pr[i - 1], pr[i]);
  double sum = 0;
  for (int r = 0; r <= 100; ++r) {
    const double target = r / 100.0;
    const auto it = std::lower_bound(rc.begin(), rc.end(), target);
    if (it != rc.end()) sum += pr[static_cast<size_t>(it - rc.begin())];
  }
  return sum / 101.0;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

CocoResult coco_map(const InstanceSet& gt, const InstanceSet& det, const DetectionMetricConfig& cfg, bool parallel) {
  const Prepared p = prepare(gt, det, cfg.max_detections);
  const size_t n_bands = cfg.area_bands.size() + 1;  // slot 0 is every area
  const size_t n_thr = cfg.coco_iou_thresholds.size();
  // ap[class][band][threshold]
  std::vector<std::vector<std::vector<std::optional<double>>>> ap(
      p.classes.size(), std::vector<std::vector<std::optional<double>>>(n_bands, std::vector<std::optional<double>>(n_thr)));
  const long n_cls = static_cast<long>(p.classes.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long c = 0; c < n_cls; ++c) {
    for (size_t b = 0; b < n_bands; ++b) {
      const AreaBand* band = b ? &cfg.area_bands[b - 1] : nullptr;
      const bool last = b == cfg.area_bands.size();
      for (size_t t = 0; t < n_thr; ++t) {
        ap[static_cast<size_t>(c)][b][t] = average_precision(p, static_cast<size_t>(c), cfg.coco_iou_thresholds[t], band, last);
      }
    }
  }
  CocoResult r;
  for (size_t b = 0; b < n_bands; ++b) {
    std::vector<double> vals;
    for (size_t c = 0; c < p.classes.size(); ++c) {
      std::vector<double> per;
      for (const auto& v : ap[c][b]) {
        if (v) per.push_back(*v);
      }
      if (per.empty()) continue;
      vals.insert(vals.end(), per.begin(), per.end());
      if (b == 0) r.per_class[p.classes[c]] = mean(per);
    }
    const std::optional<double> m = vals.empty() ? std::nullopt : std::optional<double>(mean(vals));
    if (b == 0) {
      r.overall = m;
    } else {
      r.per_band[cfg.area_bands[b - 1].name] = m;
    }
  }
  return r;
}

TmapResult t_map(const InstanceSet& gt, const InstanceSet& det, const DetectionMetricConfig& cfg) {
  const Prepared p = prepare(gt, det, cfg.max_detections);
  TmapResult r;
  for (size_t b = 0; b <= cfg.area_bands.size(); ++b) {
    const AreaBand* band = b ? &cfg.area_bands[b - 1] : nullptr;
    const bool last = b == cfg.area_bands.size();
    std::vector<double> combos;
    for (double s : cfg.tmap_score_thresholds) {
      for (double t : cfg.tmap_iou_thresholds) {
        size_t tp = 0, kept = 0, n_gt = 0;
        for (size_t c = 0; c < p.classes.size(); ++c) {
          for (size_t im = 0; im < p.gt_images.size(); ++im) {
            const Cell& cell = p.cells[c][im];
            if (cell.det.empty()) {
              for (size_t k : cell.gt) {
                if (!band || in_band(*band, p.gt_images[im]->instances[k].area, last)) ++n_gt;
              }
              continue;
            }
            for (Outcome o : match_cell(cell, p.gt_images[im], p.det_images[im], t, band, last, s, n_gt)) {
              if (o == Outcome::kIgnored) continue;
              ++kept;
              tp += o == Outcome::kTp ? 1 : 0;
            }
          }
        }
        combos.push_back(kept ? static_cast<double>(tp) / static_cast<double>(kept) : (n_gt ? 0.0 : 1.0));
      }
    }
    const double m = mean(combos);
    if (b == 0) {
      r.overall = m;
      r.combinations = combos;
    } else {
      r.per_band[cfg.area_bands[b - 1].name] = m;
    }
  }
  return r;
}

Json coco_to_json(const CocoResult& r) {
  Json bands = Json::object();
  for (const auto& [k, v] : r.per_band) bands[k] = v ? Json(*v) : Json(nullptr);
  return {{"overall", r.overall ? Json(*r.overall) : Json(nullptr)}, {"per_class", r.per_class}, {"per_band", bands}};
}

Json tmap_to_json(const TmapResult& r) {
  return {{"overall", r.overall}, {"per_band", r.per_band}, {"combinations", r.combinations}};
}

}  // namespace arena::metrics
