#include "commands.hpp"

#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "arena/error.hpp"
#include "arena/metrics/detection.hpp"
#include "arena/metrics/episode.hpp"
#include "arena/planner/compile.hpp"
#include "arena/planner/demonstrate.hpp"
#include "arena/planner/pddl.hpp"
#include "arena/runtime/episode_log.hpp"
#include "arena/server/hub.hpp"
#include "arena/server/ws_server.hpp"
#include "arena/util/files.hpp"
#include "arena/util/json.hpp"

namespace arena::cli {

namespace fs = std::filesystem;
using util::Json;

std::optional<cdf::TaskType> task_type_from_string(std::string_view s) {
  if (auto t = cdf::parse_task_type(s)) return t;
  for (cdf::TaskType t : cdf::kAllTaskTypes) {
    if (cdf::task_slug(t) == s) return t;
  }
  return std::nullopt;
}

std::vector<std::string> gen_missions(const GenOptions& o, const Resources& res) {
  if (o.types.empty()) throw Error(Errc::kEmptyInput, "no task types selected");
  cdf::SampleOptions opt;
  opt.seed = o.seed;
  opt.n = o.n * o.types.size();
  opt.unique_tool = o.unique_tool;
  const auto missions = cdf::sample_missions(cdf::default_pool(o.types), res, opt);
  std::vector<std::string> ids;
  Json index = {{"seed", o.seed}, {"n_per_type", o.n}, {"unique_tool", o.unique_tool}, {"missions", Json::array()}};
  for (const auto& t : o.types) index["types"].push_back(cdf::task_type_name(t));
  for (const auto& c : missions) {
    util::write_file_atomic(o.out / (c.cdf_id + ".json"), cdf::serialize_cdf(c));
    index["missions"].push_back({{"cdf_id", c.cdf_id}, {"task_type", c.task_type}});
    ids.push_back(c.cdf_id);
  }
  util::write_file_atomic(o.out / "index.json", util::canonical_dump(index));
  return ids;
}

namespace {

std::vector<fs::path> cdf_files(const fs::path& p) {
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "index.json") {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error(Errc::kEmptyInput, "no CDF files in " + p.string());
  return out;
}

}  // namespace

std::vector<PlanReport> plan(const fs::path& cdf_path, const PlanOptions& o, const Resources& res) {
  const bool many = fs::is_directory(cdf_path);
  std::vector<cdf::CDF> cdfs;
  for (const auto& f : cdf_files(cdf_path)) cdfs.push_back(cdf::parse_cdf(util::read_file(f), res));

  std::vector<PlanReport> reports(cdfs.size());
  std::vector<planner::PlanningProblem> problems;
  std::vector<size_t> compiled;  // report index per problem
  for (size_t i = 0; i < cdfs.size(); ++i) {
    reports[i].cdf_id = cdfs[i].cdf_id;
    try {
      problems.push_back(planner::compile(cdfs[i], res));
      compiled.push_back(i);
    } catch (const Error& e) {
      if (!many) throw;
      reports[i].error = e.what();
    }
  }
  const auto results = o.parallel ? planner::plan_batch(problems, o.search) : planner::plan_batch_serial(problems, o.search);

  for (size_t k = 0; k < compiled.size(); ++k) {
    const size_t i = compiled[k];
    PlanReport& r = reports[i];
    if (o.pddl_out) {
      const auto text = planner::export_pddl(problems[k]);
      util::write_file_atomic(*o.pddl_out / (r.cdf_id + ".domain.pddl"), text.domain);
      util::write_file_atomic(*o.pddl_out / (r.cdf_id + ".problem.pddl"), text.problem);
    }
    if (!results[k].plan) {
      if (!many) throw Error(*results[k].error, results[k].message);
      r.error = std::string(errc_name(*results[k].error)) + ": " + results[k].message;
      continue;
    }
    try {
      const auto demo = planner::execute_plan(cdfs[i], res, *results[k].plan);
      r.ok = true;
      r.cost = demo.plan.cost;
      r.m = runtime::parse_log(demo.log).m();
      for (const auto& a : demo.plan.steps) r.steps.push_back(action_label(a));
      r.log = demo.log;
    } catch (const Error& e) {
      if (!many) throw;
      r.error = e.what();
      continue;
    }
    if (o.log_out) {
      util::write_file_atomic(many ? *o.log_out / (r.cdf_id + ".jsonl") : *o.log_out, r.log);
    }
  }
  return reports;
}

namespace {

runtime::EpisodeLog read_log(const fs::path& p) { return runtime::parse_log(util::read_file(p)); }

void emit(const Json& j, const std::optional<fs::path>& out_file, std::ostream& out) {
  const std::string text = util::canonical_dump(j);
  if (out_file) util::write_file_atomic(*out_file, text);
  out << text;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Headless embodied mission platform", "arena"};
  app.require_subcommand(1);
  std::string data_dir = default_data_dir().string();
  app.add_option("--data", data_dir, "data directory (catalog, rules, layouts)")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "run the WebSocket session server");
  std::string bind;
  std::string missions_dir;
  std::string logs_dir = "logs";
  size_t max_sessions = 64;
  int threads = 2;
  serve->add_option("--bind", bind, "host:port, default $ARENA_BIND or 127.0.0.1:8765");
  serve->add_option("--missions", missions_dir, "directory for start_mission by cdf_id");
  serve->add_option("--logs", logs_dir, "episode log directory")->capture_default_str();
  serve->add_option("--max-sessions", max_sessions)->capture_default_str()->check(CLI::PositiveNumber);
  serve->add_option("--threads", threads)->capture_default_str()->check(CLI::Range(1, 64));

  // gen-missions
  auto* gen = app.add_subcommand("gen-missions", "sample mission CDFs");
  GenOptions g;
  std::string types;
  std::string gen_out;
  gen->add_option("--seed", g.seed)->required();
  gen->add_option("--n", g.n, "missions per task type")->required()->check(CLI::PositiveNumber);
  gen->add_option("--types", types, "comma-separated task types (default all)");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_flag("--unique-tool", g.unique_tool, "leave one tool per state change");

  // plan
  auto* pl = app.add_subcommand("plan", "plan a CDF (or a directory of them) and write expert logs");
  std::string cdf_path, pddl_out, log_out, mode = "bfs";
  size_t budget = planner::SearchOptions{}.max_expansions;
  bool serial = false;
  pl->add_option("--cdf", cdf_path, "CDF file or directory")->required()->check(CLI::ExistingPath);
  pl->add_option("--pddl-out", pddl_out, "directory for <cdf_id>.domain.pddl / .problem.pddl");
  pl->add_option("--log-out", log_out, "episode log file (directory when --cdf is one)");
  pl->add_option("--mode", mode)->capture_default_str()->check(CLI::IsMember({"bfs", "astar"}));
  pl->add_option("--max-expansions", budget)->capture_default_str()->check(CLI::PositiveNumber);
  pl->add_flag("--serial", serial, "plan on one thread");

  // replay
  auto* rp = app.add_subcommand("replay", "re-run an episode log and check every frame");
  std::string log_path;
  rp->add_option("--log", log_path)->required()->check(CLI::ExistingFile);

  // eval
  auto* ev = app.add_subcommand("eval", "MSR / NRA over a directory of episode logs");
  std::string episodes, eval_out;
  ev->add_option("--episodes", episodes)->required()->check(CLI::ExistingDirectory);
  ev->add_option("--out", eval_out, "also write the report here");

  // eval-det
  auto* ed = app.add_subcommand("eval-det", "COCO mAP and t-mAP for detections");
  std::string gt, det, det_out;
  bool det_serial = false;
  ed->add_option("--gt", gt)->required()->check(CLI::ExistingFile);
  ed->add_option("--det", det)->required()->check(CLI::ExistingFile);
  ed->add_option("--out", det_out, "also write the report here");
  ed->add_flag("--serial", det_serial, "per-class work on one thread");

  try {
    app.parse(argc, argv);
    if (gen->parsed() && !types.empty()) {
      std::vector<cdf::TaskType> list;
      std::string item;
      for (size_t i = 0; i <= types.size(); ++i) {
        if (i == types.size() || types[i] == ',') {
          if (auto t = task_type_from_string(item)) {
            if (std::find(list.begin(), list.end(), *t) == list.end()) list.push_back(*t);
          } else {
            throw CLI::ValidationError("--types", "unknown task type '" + item + "'");
          }
          item.clear();
        } else {
          item += types[i];
        }
      }
      g.types = list;
    }
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    const Resources res = Resources::load(data_dir);
    if (serve->parsed()) {
      server::HubOptions ho;
      ho.max_sessions = max_sessions;
      if (!missions_dir.empty()) ho.missions_dir = missions_dir;
      ho.log_dir = fs::path(logs_dir);
      server::Hub hub(res, ho);
      const auto addr = bind.empty() ? server::bind_from_env() : server::parse_bind(bind);
      server::WsServer ws(hub, addr, threads);
      err << "arena: listening on " << addr.host << ":" << ws.port() << std::endl;
      ws.run_until_signal();
      return 0;
    }
    if (gen->parsed()) {
      g.out = gen_out;
      const auto ids = gen_missions(g, res);
      out << "wrote " << ids.size() << " missions to " << gen_out << "\n";
      return 0;
    }
    if (pl->parsed()) {
      PlanOptions po;
      po.search.mode = *planner::parse_search_mode(mode);
      po.search.max_expansions = budget;
      po.parallel = !serial;
      if (!pddl_out.empty()) po.pddl_out = pddl_out;
      if (!log_out.empty()) po.log_out = log_out;
      const auto reports = plan(cdf_path, po, res);
      size_t ok = 0;
      if (reports.size() == 1 && !fs::is_directory(cdf_path)) {
        const auto& r = reports[0];
        for (size_t i = 0; i < r.steps.size(); ++i) out << i + 1 << " " << r.steps[i] << "\n";
        out << "cost " << r.cost << " m " << r.m << "\n";
        return 0;
      }
      for (const auto& r : reports) {
        if (r.ok) {
          ++ok;
          out << r.cdf_id << " cost " << r.cost << " m " << r.m << "\n";
        } else {
          out << r.cdf_id << " FAILED " << r.error << "\n";
          err << "arena: " << r.cdf_id << ": " << r.error << "\n";
        }
      }
      out << "planned " << ok << "/" << reports.size() << "\n";
      return ok == reports.size() ? 0 : 1;
    }
    if (rp->parsed()) {
      const auto log = read_log(log_path);
      const auto s = runtime::replay(log, res);
      out << "ok " << log.cdf_id() << " m " << log.m() << " steps " << s.steps_used() << " frames "
          << s.frames().size() << "\n";
      return 0;
    }
    if (ev->parsed()) {
      const auto report = metrics::episode_metrics(metrics::load_logs(episodes));
      emit(metrics::report_to_json(report), eval_out.empty() ? std::nullopt : std::optional<fs::path>(eval_out), out);
      return 0;
    }
    if (ed->parsed()) {
      const auto g_set = metrics::parse_instances(util::read_file(gt), false);
      const auto d_set = metrics::parse_instances(util::read_file(det), true);
      const Json report = {{"coco", metrics::coco_to_json(metrics::coco_map(g_set, d_set, {}, !det_serial))},
                           {"tmap", metrics::tmap_to_json(metrics::t_map(g_set, d_set))}};
      emit(report, det_out.empty() ? std::nullopt : std::optional<fs::path>(det_out), out);
      return 0;
    }
  } catch (const Error& e) {
    err << "arena: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "arena: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace arena::cli
