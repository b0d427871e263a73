#include "detection_oracle.hpp"

#include <algorithm>
#include <set>

namespace arena::testing {

using namespace arena::metrics;

namespace {

// ---- brute-force oracle over a unit raster ---------------------------------

struct Raster {
  std::set<std::pair<int, int>> cells;
};

Raster raster(const Region& r) {
  Raster out;
  if (const Box* b = std::get_if<Box>(&r)) {
    for (int x = static_cast<int>(b->x); x < static_cast<int>(b->x + b->w); ++x) {
      for (int y = static_cast<int>(b->y); y < static_cast<int>(b->y + b->h); ++y) out.cells.insert({x, y});
    }
  } else {
    const Mask& m = std::get<Mask>(r);
    const auto bits = decode_mask(m);
    for (int y = 0; y < m.height; ++y) {
      for (int x = 0; x < m.width; ++x) {
        if (bits[static_cast<size_t>(y * m.width + x)]) out.cells.insert({x, y});
      }
    }
  }
  return out;
}

double oracle_iou(const Region& a, const Region& b) {
  const Raster ra = raster(a), rb = raster(b);
  size_t inter = 0;
  for (const auto& c : ra.cells) inter += rb.cells.count(c);
  const size_t uni = ra.cells.size() + rb.cells.size() - inter;
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

struct Judged {
  double score;
  int status;  // 1 tp, 0 fp, -1 ignored
};

const Image* find_image(const InstanceSet& s, const std::string& id) {
  for (const auto& im : s) {
    if (im.image_id == id) return &im;
  }
  return nullptr;
}

bool band_has(const AreaBand* band, double area, bool last) {
  if (!band) return true;
  if (area < band->lo) return false;
  return last || area < band->hi;
}

// Judges every kept detection of `cls` at threshold `t`; counts the GT that
// is not ignored.
std::vector<Judged> judge(const InstanceSet& gt, const InstanceSet& det, const std::string& cls, double t,
                          double min_score, const AreaBand* band, bool last, size_t& n_gt) {
  std::set<std::string> ids;
  for (const auto& im : gt) ids.insert(im.image_id);
  for (const auto& im : det) ids.insert(im.image_id);
  std::vector<Judged> out;
  for (const auto& id : ids) {
    const Image* gi = find_image(gt, id);
    const Image* di = find_image(det, id);
    std::vector<const Instance*> gts;
    if (gi) {
      for (const auto& g : gi->instances) {
        if (g.cls != cls) continue;
        gts.push_back(&g);
        if (band_has(band, g.area, last)) ++n_gt;
      }
    }
    if (!di) continue;
    std::vector<const Instance*> dets;
    for (const auto& d : di->instances) dets.push_back(&d);
    std::stable_sort(dets.begin(), dets.end(), [](auto* a, auto* b) { return a->score > b->score; });
    if (dets.size() > 100) dets.resize(100);
    std::vector<bool> used(gts.size(), false);
    for (const Instance* d : dets) {
      if (d->cls != cls || d->score < min_score) continue;
      int pick = -1;
      for (int pass = 0; pass < 2 && pick < 0; ++pass) {
        double best = -1;
        for (size_t g = 0; g < gts.size(); ++g) {
          const bool ignored = !band_has(band, gts[g]->area, last);
          if (used[g] || ignored != (pass == 1)) continue;
          const double v = oracle_iou(d->region, gts[g]->region);
          if (v >= t && v > best) {
            best = v;
            pick = static_cast<int>(g);
          }
        }
      }
      if (pick >= 0) {
        used[static_cast<size_t>(pick)] = true;
        out.push_back({d->score, band_has(band, gts[static_cast<size_t>(pick)]->area, last) ? 1 : -1});
      } else {
        out.push_back({d->score, band_has(band, d->area, last) ? 0 : -1});
      }
    }
  }
  return out;
}

}  // namespace

std::optional<double> oracle_map(const InstanceSet& gt, const InstanceSet& det, const AreaBand* band, bool last) {
  std::set<std::string> classes;
  for (const auto& im : gt) for (const auto& g : im.instances) classes.insert(g.cls);
  double sum = 0;
  size_t n = 0;
  for (const auto& cls : classes) {
    for (int k = 10; k <= 19; ++k) {
      size_t n_gt = 0;
      auto js = judge(gt, det, cls, k / 20.0, -1.0, band, last, n_gt);
      if (n_gt == 0) continue;
      js.erase(std::remove_if(js.begin(), js.end(), [](const Judged& j) { return j.status < 0; }), js.end());
      std::stable_sort(js.begin(), js.end(), [](const Judged& a, const Judged& b) { return a.score > b.score; });
      // interpolated precision: best precision at any prefix reaching the recall level
      double ap = 0;
      for (int r = 0; r <= 100; ++r) {
        double best = 0;
        size_t tp = 0;
        for (size_t i = 0; i < js.size(); ++i) {
          tp += js[i].status;
          const double recall = static_cast<double>(tp) / static_cast<double>(n_gt);
          if (recall >= r / 100.0) best = std::max(best, static_cast<double>(tp) / static_cast<double>(i + 1));
        }
        ap += best;
      }
      sum += ap / 101.0;
      ++n;
    }
  }
  if (!n) return std::nullopt;
  return sum / static_cast<double>(n);
}

double oracle_tmap(const InstanceSet& gt, const InstanceSet& det, const AreaBand* band, bool last) {
  std::set<std::string> classes;
  for (const auto& im : gt) for (const auto& g : im.instances) classes.insert(g.cls);
  for (const auto& im : det) for (const auto& d : im.instances) classes.insert(d.cls);
  double sum = 0;
  for (double s : {0.05, 0.1, 0.3, 0.5, 0.7}) {
    for (double t : {0.1, 0.3, 0.4, 0.5, 0.75, 0.8}) {
      size_t tp = 0, kept = 0, n_gt = 0;
      for (const auto& cls : classes) {
        for (const auto& j : judge(gt, det, cls, t, s, band, last, n_gt)) {
          if (j.status < 0) continue;
          ++kept;
          tp += static_cast<size_t>(j.status);
        }
      }
      sum += kept ? static_cast<double>(tp) / static_cast<double>(kept) : (n_gt ? 0.0 : 1.0);
    }
  }
  return sum / 30.0;
}

namespace {

// Boxes on a 30x30 grid of 10px units so areas span every band; masks on a
// 6x6 bitmap.
Region random_region(util::Rng& rng, bool masks) {
  if (masks) {
    std::vector<uint8_t> bits(36);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.below(3) == 0);
    return encode_mask(6, 6, bits);
  }
  const int w = 1 + static_cast<int>(rng.below(12)), h = 1 + static_cast<int>(rng.below(12));
  const int x = static_cast<int>(rng.below(31 - static_cast<uint64_t>(w)));
  const int y = static_cast<int>(rng.below(31 - static_cast<uint64_t>(h)));
  return Box{static_cast<double>(x), static_cast<double>(y), static_cast<double>(w), static_cast<double>(h)};
}

Region jitter(util::Rng& rng, const Region& r) {
  if (std::holds_alternative<Mask>(r)) {
    auto bits = decode_mask(std::get<Mask>(r));
    bits[rng.below(bits.size())] ^= 1;
    return encode_mask(6, 6, bits);
  }
  Box b = std::get<Box>(r);
  if (b.w > 1 && rng.coin()) b.w -= 1;
  if (rng.coin()) b.x = std::min(b.x + 1, 30 - b.w);
  return b;
}

// Areas in px^2 for boxes (unit = 10px); masks stay tiny.
double area_px(const Region& r) {
  return std::holds_alternative<Box>(r) ? region_area(r) * 100.0 : region_area(r);
}

}  // namespace

std::pair<InstanceSet, InstanceSet> random_case(util::Rng& rng) {
  const bool masks = rng.below(4) == 0;
  InstanceSet gt, det;
  const std::vector<std::string> classes = {"cup", "desk", "toy"};
  std::set<int> used_scores;
  const size_t n_img = 1 + rng.below(5);
  for (size_t i = 0; i < n_img; ++i) {
    Image g{"im" + std::to_string(i), {}}, d{"im" + std::to_string(i), {}};
    const size_t ng = rng.below(4), nd = rng.below(5);
    for (size_t k = 0; k < ng; ++k) {
      Instance inst;
      inst.cls = rng.pick(classes);
      inst.region = random_region(rng, masks);
      inst.area = area_px(inst.region);
      g.instances.push_back(inst);
    }
    for (size_t k = 0; k < nd; ++k) {
      Instance inst;
      if (!g.instances.empty() && rng.below(3) != 0) {
        const Instance& src = rng.pick(g.instances);
        inst.cls = rng.below(6) ? src.cls : rng.pick(classes);
        inst.region = rng.coin() ? src.region : jitter(rng, src.region);
      } else {
        inst.cls = rng.pick(classes);
        inst.region = random_region(rng, masks);
      }
      inst.area = area_px(inst.region);
      int s;
      do {
        s = static_cast<int>(rng.below(1000));
      } while (!used_scores.insert(s).second);
      inst.score = s / 1000.0;
      d.instances.push_back(inst);
    }
    if (rng.below(5)) gt.push_back(g);
    if (rng.below(5)) det.push_back(d);
  }
  return {gt, det};
}

// Scale box coordinates to px so the library sees the same geometry.
InstanceSet to_px(InstanceSet s) {
  for (auto& im : s) {
    for (auto& inst : im.instances) {
      if (Box* b = std::get_if<Box>(&inst.region)) *b = Box{b->x * 10, b->y * 10, b->w * 10, b->h * 10};
    }
  }
  return s;
}

}  // namespace arena::testing
