#include <benchmark/benchmark.h>

#include "arena/cdf/sampler.hpp"
#include "arena/metrics/detection.hpp"
#include "arena/planner/compile.hpp"
#include "arena/planner/search.hpp"
#include "arena/util/rng.hpp"

using namespace arena;

namespace {

const std::vector<planner::PlanningProblem>& problems() {
  static const auto out = [] {
    cdf::SampleOptions opt;
    opt.seed = 42;
    opt.n = 48;
    std::vector<planner::PlanningProblem> ps;
    const auto& res = Resources::shipped();
    for (const auto& c : cdf::sample_missions(cdf::default_pool(), res, opt)) ps.push_back(planner::compile(c, res));
    return ps;
  }();
  return out;
}

void BM_PlanBatchSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(planner::plan_batch_serial(problems()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(problems().size()));
}
BENCHMARK(BM_PlanBatchSerial)->Unit(benchmark::kMillisecond);

void BM_PlanBatchOpenMP(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(planner::plan_batch(problems()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(problems().size()));
}
BENCHMARK(BM_PlanBatchOpenMP)->Unit(benchmark::kMillisecond);

void BM_PlanAstar(benchmark::State& state) {
  planner::SearchOptions o;
  o.mode = planner::SearchMode::kAstar;
  for (auto _ : state) benchmark::DoNotOptimize(planner::plan_batch_serial(problems(), o));
}
BENCHMARK(BM_PlanAstar)->Unit(benchmark::kMillisecond);

// Synthetic detection set: `classes` classes over 300 images, GT jittered
// into detections plus clutter.
std::pair<metrics::InstanceSet, metrics::InstanceSet> detections(int classes) {
  util::Rng rng(1);
  metrics::InstanceSet gt, det;
  for (int i = 0; i < 300; ++i) {
    metrics::Image g{"img" + std::to_string(i), {}}, d{g.image_id, {}};
    for (int k = 0; k < 8; ++k) {
      metrics::Instance inst;
      inst.cls = "c" + std::to_string(rng.below(static_cast<uint64_t>(classes)));
      const double w = 10 + static_cast<double>(rng.below(150)), h = 10 + static_cast<double>(rng.below(150));
      const double x = static_cast<double>(rng.below(400)), y = static_cast<double>(rng.below(400));
      inst.region = metrics::Box{x, y, w, h};
      inst.area = w * h;
      g.instances.push_back(inst);
      metrics::Instance hit = inst;
      hit.region = metrics::Box{x + static_cast<double>(rng.below(8)), y, w, h - static_cast<double>(rng.below(8))};
      hit.score = static_cast<double>(rng.below(1000)) / 1000.0;
      d.instances.push_back(hit);
      metrics::Instance miss = inst;
      miss.region = metrics::Box{static_cast<double>(rng.below(400)), static_cast<double>(rng.below(400)), w, h};
      miss.score = static_cast<double>(rng.below(1000)) / 1000.0;
      d.instances.push_back(miss);
    }
    gt.push_back(std::move(g));
    det.push_back(std::move(d));
  }
  return {gt, det};
}

void BM_CocoMap(benchmark::State& state) {
  const auto [gt, det] = detections(static_cast<int>(state.range(0)));
  const bool parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(metrics::coco_map(gt, det, {}, parallel));
  state.SetLabel(parallel ? "openmp" : "serial");
}
BENCHMARK(BM_CocoMap)->ArgsProduct({{8, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_TMap(benchmark::State& state) {
  const auto [gt, det] = detections(16);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::t_map(gt, det));
}
BENCHMARK(BM_TMap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
