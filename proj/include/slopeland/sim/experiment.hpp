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

// Batch experiments: a grid of inclines x seeded runs, summarized as a table
// of signed incline errors with per-set and total mean absolute errors.
//
// Set file (same key = value format as scenario configs):
//
//   experiment.name = table2
//   experiment.inclines_deg = 11.3, 20.6, 30.5
//   experiment.runs_per_incline = 3
//   experiment.seed_base = 1
//   experiment.base_config = default.cfg   # optional, relative to this file
//   sensor.gyro_noise_sigma = 0.01         # any scenario key: shared override

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "slopeland/errors.hpp"
#include "slopeland/sim/config.hpp"
#include "slopeland/sim/pipeline.hpp"
#include "slopeland/sim/report.hpp"
#include "slopeland/sim/text.hpp"

namespace slopeland::sim {

struct ExperimentSet {
  std::string name = "experiment";
  std::vector<double> inclines_deg;
  int runs_per_incline = 1;
  std::uint64_t seed_base = 1;
  std::string base_config;  // resolved path, empty for built-in defaults
  std::vector<KeyValue> overrides;
};

inline ExperimentSet parse_experiment_set(std::istream& in,
                                          const std::filesystem::path& base_dir = {}) {
  ExperimentSet set;
  bool have_inclines = false;
  ScenarioConfig probe;  // validates override keys early
  for (const KeyValue& kv : parse_key_values(in)) {
    if (kv.key == "experiment.name") {
      set.name = kv.value;
    } else if (kv.key == "experiment.inclines_deg") {
      for (std::string_view item : split(kv.value, ',')) {
        auto v = parse_double(item);
        if (!v) throw ParseError("experiment.inclines_deg: bad number '" + std::string(trim(item)) + "'", kv.line);
        set.inclines_deg.push_back(*v);
      }
      have_inclines = true;
    } else if (kv.key == "experiment.runs_per_incline") {
      auto v = parse_int<int>(kv.value);
      if (!v || *v < 1) throw ParseError("experiment.runs_per_incline must be an integer >= 1", kv.line);
      set.runs_per_incline = *v;
    } else if (kv.key == "experiment.seed_base") {
      auto v = parse_int<std::uint64_t>(kv.value);
      if (!v) throw ParseError("experiment.seed_base must be a non-negative integer", kv.line);
      set.seed_base = *v;
    } else if (kv.key == "experiment.base_config") {
      std::filesystem::path p(kv.value);
      set.base_config = (p.is_relative() ? base_dir / p : p).string();
    } else if (kv.key.rfind("experiment.", 0) == 0) {
      throw ParseError("unknown key '" + kv.key + "'", kv.line);
    } else {
      set_value(probe, kv.key, kv.value, kv.line);
      set.overrides.push_back(kv);
    }
  }
  if (!have_inclines || set.inclines_deg.empty()) {
    throw ParseError("experiment.inclines_deg is required", 0);
  }
  return set;
}

inline ExperimentSet load_experiment_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open experiment set file '" + path + "'");
  return parse_experiment_set(in, std::filesystem::path(path).parent_path());
}

struct ExperimentRun {
  double incline_deg = 0.0;
  std::uint64_t seed = 0;
  int index = 0;  // 0-based within the incline
  std::optional<RunReport> report;
  std::string error;  // set when the run could not start (e.g. invalid config)

  bool landed() const { return report && report->outcome == Phase::kLanded; }
  std::string outcome() const { return report ? to_string(report->outcome) : "Aborted"; }
};

struct ExperimentResult {
  ExperimentSet set;
  std::vector<ExperimentRun> runs;  // incline-major order
};

inline ScenarioConfig scenario_for(const ExperimentSet& set, const ScenarioConfig& base,
                                   double incline_deg, std::uint64_t seed) {
  ScenarioConfig c = base;
  apply_values(c, set.overrides);
  c.name = set.name;
  c.world.incline_deg = incline_deg;
  c.sensor.seed = seed;
  return c;
}

inline std::filesystem::path run_directory(const std::filesystem::path& root,
                                           const ExperimentSet& set, double incline_deg,
                                           std::uint64_t seed) {
  return root / set.name / format_double(incline_deg) / std::to_string(seed);
}

// Runs the grid with up to `jobs` runs in flight. Results do not depend on
// `jobs`. When `out_root` is given every run writes its own directory.
inline ExperimentResult run_experiment(const ExperimentSet& set, const ScenarioConfig& base,
                                       const std::optional<std::filesystem::path>& out_root = {},
                                       int jobs = 1) {
  ExperimentResult result;
  result.set = set;
  for (double a : set.inclines_deg) {
    for (int k = 0; k < set.runs_per_incline; ++k) {
      ExperimentRun run;
      run.incline_deg = a;
      run.index = k;
      run.seed = set.seed_base + static_cast<std::uint64_t>(k);
      result.runs.push_back(run);
    }
  }
  auto execute = [&](ExperimentRun& run) {
    try {
      const ScenarioConfig c = scenario_for(set, base, run.incline_deg, run.seed);
      run.report = run_pipeline(c);
    } catch (const Error& e) {
      run.error = e.what();
    }
    if (run.report && out_root) {
      write_run_files(*run.report, run_directory(*out_root, set, run.incline_deg, run.seed));
    }
  };
  jobs = std::max(1, jobs);
  for (size_t start = 0; start < result.runs.size(); start += jobs) {
    const size_t end = std::min(result.runs.size(), start + static_cast<size_t>(jobs));
    if (jobs == 1) {
      execute(result.runs[start]);
      continue;
    }
    std::vector<std::future<void>> pending;
    for (size_t i = start; i < end; ++i) {
      pending.push_back(std::async(std::launch::async, execute, std::ref(result.runs[i])));
    }
    for (auto& f : pending) f.get();
  }
  return result;
}

// Table with one row per incline: signed errors per run, then the set mean
// absolute error; a final Total row carries the mean absolute error over all
// landed runs. Aborted runs show "Aborted" and are left out of the averages.
struct ErrorTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // cells, including the label
  std::string total;
};

inline ErrorTable error_table(const ExperimentResult& r) {
  ErrorTable t;
  t.header.push_back("Set");
  for (int k = 0; k < r.set.runs_per_incline; ++k) t.header.push_back("Exp. " + std::to_string(k + 1));
  t.header.push_back("Set avg. abs.");
  double total_sum = 0.0;
  int total_n = 0;
  size_t i = 0;
  for (double a : r.set.inclines_deg) {
    std::vector<std::string> row{format_double(a)};
    double sum = 0.0;
    int n = 0;
    for (int k = 0; k < r.set.runs_per_incline; ++k, ++i) {
      const ExperimentRun& run = r.runs[i];
      if (run.landed() && run.report->has_estimate()) {
        const double e = run.report->error_deg();
        row.push_back(format_fixed(e, 2));
        sum += std::abs(e);
        ++n;
      } else {
        row.push_back("Aborted");
      }
    }
    row.push_back(n > 0 ? format_fixed(sum / n, 2) : "n/a");
    t.rows.push_back(row);
    total_sum += sum;
    total_n += n;
  }
  t.total = total_n > 0 ? format_fixed(total_sum / total_n, 2) : "n/a";
  return t;
}

inline std::string format_table(const ErrorTable& t) {
  std::vector<size_t> width(t.header.size(), 0);
  for (size_t c = 0; c < t.header.size(); ++c) {
    width[c] = t.header[c].size();
    for (const auto& row : t.rows) width[c] = std::max(width[c], row[c].size());
  }
  width.back() = std::max(width.back(), t.total.size());
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (size_t c = 0; c < cells.size(); ++c) {
      std::string cell = cells[c];
      if (c > 0) s += " | ";
      s += cell + std::string(width[c] - cell.size(), ' ');
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + "\n";
  };
  size_t total_width = 0;
  for (size_t w : width) total_width += w;
  total_width += 3 * (width.size() - 1);
  const std::string rule(total_width, '-');
  std::string out = "Incline estimation error (deg), estimated minus true\n";
  out += line(t.header) + rule + "\n";
  for (const auto& row : t.rows) out += line(row);
  out += rule + "\n";
  std::vector<std::string> total(t.header.size(), "");
  total[total.size() - 2] = "Total";
  total.back() = t.total;
  out += line(total);
  return out;
}

inline std::string table_csv(const ErrorTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t c = 0; c < cells.size(); ++c) out += (c ? "," : "") + cells[c];
    out += "\n";
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
  std::vector<std::string> total(t.header.size(), "");
  total.front() = "Total";
  total.back() = t.total;
  line(total);
  return out;
}

inline std::string runs_csv(const ExperimentResult& r) {
  std::string out = "seed," + summary_header() + "\n";
  for (const ExperimentRun& run : r.runs) {
    if (run.report) {
      out += std::to_string(run.seed) + "," + summary_row(*run.report) + "\n";
    } else {
      out += std::to_string(run.seed) + "," + csv_escape(r.set.name) + "," +
             format_double(run.incline_deg) + ",,,,Aborted," + csv_escape(run.error) + ",0,0\n";
    }
  }
  return out;
}

inline void write_experiment_files(const ExperimentResult& r, const std::filesystem::path& root) {
  const std::filesystem::path dir = root / r.set.name;
  std::filesystem::create_directories(dir);
  const ErrorTable t = error_table(r);
  write_text_file(dir / "table.txt", format_table(t));
  write_text_file(dir / "table.csv", table_csv(t));
  write_text_file(dir / "runs.csv", runs_csv(r));
}

}  // namespace slopeland::sim
