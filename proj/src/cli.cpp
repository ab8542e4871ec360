// Copyright 2026 The slopeland Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slopeland/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "slopeland/arm_kinematics.hpp"
#include "slopeland/errors.hpp"
#include "slopeland/sim/config.hpp"
#include "slopeland/sim/experiment.hpp"
#include "slopeland/sim/pipeline.hpp"
#include "slopeland/sim/replay.hpp"
#include "slopeland/sim/report.hpp"

namespace slopeland::cli {
namespace {

std::filesystem::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SLOPELAND_OUT"); env && *env) return env;
  return "out";
}

sim::ScenarioConfig load_with_overrides(const std::string& path,
                                               const std::vector<std::string>& sets) {
  sim::ScenarioConfig c = path.empty() ? sim::ScenarioConfig{} : sim::load_scenario(path);
  for (const std::string& s : sets) {
    const sim::KeyValue kv = sim::parse_override(s);
    sim::set_value(c, kv.key, kv.value);
  }
  sim::validate(c);
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
                   const std::string& out_flag, std::ostream& out) {
  const sim::ScenarioConfig c = load_with_overrides(config_path, sets);
  const auto start = std::chrono::steady_clock::now();
  const sim::RunReport r = sim::run_pipeline(c);
  const std::filesystem::path dir =
      output_root(out_flag) / c.name / sim::format_double(c.world.incline_deg) /
      std::to_string(c.sensor.seed);
  sim::write_run_files(r, dir);
  out << "outcome: " << sim::to_string(r.outcome);
  if (!r.reason.empty()) out << " (" << r.reason << ")";
  out << "\n";
  out << "incline true/est: " << sim::format_fixed(r.incline_true_deg, 2) << " / "
      << (r.has_estimate() ? sim::format_fixed(r.incline_est_deg(), 2) : "n/a") << " deg\n";
  out << "contacts: " << r.events.size() << ", sim time " << sim::format_fixed(r.sim_time, 2)
      << " s, wall time " << sim::format_fixed(seconds_since(start), 3) << " s\n";
  out << "report: " << dir.string() << "\n";
  return r.outcome == sim::Phase::kLanded ? kExitOk : kExitAborted;
}

int cmd_experiment(const std::string& set_path, const std::string& out_flag, int jobs,
                          std::ostream& out) {
  const sim::ExperimentSet set = sim::load_experiment_set(set_path);
  const sim::ScenarioConfig base =
      set.base_config.empty() ? sim::ScenarioConfig{} : sim::load_scenario(set.base_config);
  const std::filesystem::path root = output_root(out_flag);
  const auto start = std::chrono::steady_clock::now();
  const sim::ExperimentResult result = sim::run_experiment(set, base, root, jobs);
  sim::write_experiment_files(result, root);
  out << sim::format_table(sim::error_table(result));
  for (const sim::ExperimentRun& run : result.runs) {
    if (run.landed()) continue;
    out << "run " << sim::format_double(run.incline_deg) << " deg seed " << run.seed << ": "
        << run.outcome() << ": " << (run.report ? run.report->reason : run.error) << "\n";
  }
  out << "wall time " << sim::format_fixed(seconds_since(start), 3) << " s; files in "
      << (root / set.name).string() << "\n";
  return kExitOk;
}

int cmd_replay(const std::string& log_path, const std::string& config_path,
                      const std::string& out_flag, std::ostream& out) {
  std::ifstream in(log_path, std::ios::binary);
  if (!in) throw Error("cannot open log file '" + log_path + "'");
  std::string cfg = config_path;
  if (cfg.empty()) {
    const auto sibling = std::filesystem::path(log_path).parent_path() / "config.cfg";
    if (std::filesystem::exists(sibling)) cfg = sibling.string();
  }
  const sim::ScenarioConfig c = load_with_overrides(cfg, {});
  const sim::RunReport r = sim::replay(in, c);
  out << sim::format_report(r);
  if (!out_flag.empty()) sim::write_run_files(r, out_flag);
  return kExitOk;
}

int cmd_workspace(int resolution, const std::vector<std::string>& sets,
                         const std::string& out_flag, std::ostream& out) {
  const sim::ScenarioConfig c = load_with_overrides("", sets);
  const WorkspaceCloud cloud = sample_workspace(c.arm_params(0), resolution);
  const std::filesystem::path dir = output_root(out_flag) / "workspace";
  std::filesystem::create_directories(dir);
  std::string pts = "q1,q2,q3,x,y,z\n";
  for (const WorkspacePoint& w : cloud.points) {
    pts += sim::format_double(w.q.q1) + "," + sim::format_double(w.q.q2) + "," +
           sim::format_double(w.q.q3) + "," + sim::format_double(w.p.x()) + "," +
           sim::format_double(w.p.y()) + "," + sim::format_double(w.p.z()) + "\n";
  }
  auto outline = [](const std::vector<Eigen::Vector2d>& o, const char* a, const char* b) {
    std::string s = std::string(a) + "," + b + "\n";
    for (const auto& v : o) s += sim::format_double(v.x()) + "," + sim::format_double(v.y()) + "\n";
    return s;
  };
  sim::write_text_file(dir / "points.csv", pts);
  sim::write_text_file(dir / "outline_yz.csv", outline(cloud.yz_outline, "y", "z"));
  sim::write_text_file(dir / "outline_xz.csv", outline(cloud.xz_outline, "x", "z"));
  out << cloud.points.size() << " points, outlines " << cloud.yz_outline.size() << " (yz) / "
      << cloud.xz_outline.size() << " (xz) vertices; files in " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proprioceptive slope probing and landing simulator"};
  app.require_subcommand(1);

  std::string config_path, out_flag, set_path, log_path;
  std::vector<std::string> sets;
  int jobs = 1, resolution = 0;

  CLI::App* run = app.add_subcommand("run", "simulate one scenario");
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--set", sets, "override, key=value (repeatable)");
  run->add_option("--out", out_flag, "output root");

  CLI::App* exp = app.add_subcommand("experiment", "run an experiment set and print the error table");
  exp->add_option("--set-file", set_path, "experiment set file")->required();
  exp->add_option("--out", out_flag, "output root");
  exp->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  CLI::App* rep = app.add_subcommand("replay", "re-run estimation over a telemetry log");
  rep->add_option("--log", log_path, "telemetry.csv")->required();
  rep->add_option("--config", config_path, "scenario config (default: config.cfg next to the log)");
  rep->add_option("--out", out_flag, "write report files to this directory");

  CLI::App* ws = app.add_subcommand("workspace", "sample the arm workspace");
  ws->add_option("--resolution", resolution, "samples per joint (>= 2)")->required();
  ws->add_option("--set", sets, "arm override, key=value (repeatable)");
  ws->add_option("--out", out_flag, "output root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, sets, out_flag, out);
    if (*exp) return cmd_experiment(set_path, out_flag, jobs, out);
    if (*rep) return cmd_replay(log_path, config_path, out_flag, out);
    if (*ws) return cmd_workspace(resolution, sets, out_flag, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace slopeland::cli
