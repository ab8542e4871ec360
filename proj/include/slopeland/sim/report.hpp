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

// Run report files: summary.csv, report.txt, telemetry.csv and config.cfg
// (the full configuration, readable by load_scenario).

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "slopeland/errors.hpp"
#include "slopeland/sim/config.hpp"
#include "slopeland/sim/pipeline.hpp"
#include "slopeland/sim/telemetry.hpp"
#include "slopeland/sim/text.hpp"

namespace slopeland::sim {

inline std::string summary_header() {
  return "name,incline_true_deg,incline_est_deg,error_deg,heading_deg,outcome,reason,contacts,"
         "sim_time_s";
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string summary_row(const RunReport& r) {
  std::string est, err, heading;
  if (r.has_estimate()) {
    est = format_double(r.incline_est_deg());
    err = format_double(r.error_deg());
    heading = format_double(r.heading_deg());
  }
  return csv_escape(r.config.name) + "," + format_double(r.incline_true_deg) + "," + est + "," +
         err + "," + heading + "," + to_string(r.outcome) + "," + csv_escape(r.reason) + "," +
         std::to_string(r.events.size()) + "," + format_double(r.sim_time);
}

inline std::string format_vec(const Vec3& v) {
  return "(" + format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z()) +
         ")";
}

inline std::string format_report(const RunReport& r) {
  std::ostringstream os;
  os << "slopeland run report\n";
  os << "scenario: " << r.config.name << "\n";
  os << "mode: " << (r.replayed ? "replay" : "simulation") << (r.partial ? " (truncated log)" : "")
     << "\n";
  os << (r.replayed ? "last_phase: " : "outcome: ") << to_string(r.outcome) << "\n";
  if (!r.reason.empty()) os << "reason: " << r.reason << "\n";
  os << "incline_true_deg: " << format_double(r.incline_true_deg) << "\n";
  if (r.has_estimate()) {
    os << "incline_est_deg: " << format_double(r.incline_est_deg()) << "\n";
    os << "error_deg: " << format_double(r.error_deg()) << "\n";
    os << "heading_deg: " << format_double(r.heading_deg()) << "\n";
  }
  os << "contacts: " << r.events.size() << "\n";
  os << "sim_time_s: " << format_double(r.sim_time) << "\n";

  os << "\n[config]\n" << dump(r.config);

  os << "\n[contacts]\n";
  for (size_t i = 0; i < r.events.size(); ++i) {
    const ContactEvent& e = r.events[i];
    os << "t=" << format_double(e.time) << " arm=" << e.arm_id;
    if (i < r.truth_arms.size()) os << " truth_arm=" << r.truth_arms[i];
    os << " p_c=" << format_vec(e.p_c_world) << " tau=" << format_vec(e.tau_observed)
       << " match_angle=" << format_double(e.match_angle) << "\n";
  }
  if (r.plane) {
    os << "\n[plane]\n";
    os << "source: " << to_string(r.plane->source) << "\n";
    os << "centroid: " << format_vec(r.plane->centroid) << "\n";
    os << "normal: " << format_vec(r.plane->normal) << "\n";
  }
  if (r.plan) {
    os << "\n[landing]\n";
    os << "approach_point: " << format_vec(r.plan->approach_point) << "\n";
    os << "target_yaw: " << format_double(r.plan->target_yaw) << "\n";
    for (size_t i = 0; i < r.plan->ee_setpoints.size(); ++i) {
      os << "arm" << i + 1 << "_ee: " << format_vec(r.plan->ee_setpoints[i])
         << " q: " << format_vec(r.plan->joint_setpoints[i].vec()) << "\n";
    }
    os << "rear_gear: " << format_vec(r.plan->rear_gear_offset) << "\n";
  }
  if (r.stance) {
    os << "\n[stance]\n";
    os << "roll_deg: " << format_double(r.stance->roll_deg) << "\n";
    os << "pitch_deg: " << format_double(r.stance->pitch_deg) << "\n";
    os << "gear_distance_m: " << format_double(r.stance->distance[0]) << "\n";
    os << "arm1_distance_m: " << format_double(r.stance->distance[1]) << "\n";
    os << "arm2_distance_m: " << format_double(r.stance->distance[2]) << "\n";
  }
  os << "\n[timeline]\n";
  for (const auto& [t, p] : r.timeline) os << format_double(t) << " " << to_string(p) << "\n";
  if (!r.warnings.empty()) {
    os << "\n[warnings]\n";
    for (const std::string& w : r.warnings) os << w << "\n";
  }
  return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

inline void write_run_files(const RunReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "summary.csv", summary_header() + "\n" + summary_row(r) + "\n");
  write_text_file(dir / "report.txt", format_report(r));
  write_text_file(dir / "config.cfg", dump(r.config));
  if (!r.replayed) {
    std::ofstream out(dir / "telemetry.csv", std::ios::binary);
    if (!out) throw Error("cannot write '" + (dir / "telemetry.csv").string() + "'");
    write_telemetry(out, r.telemetry);
  }
}

}  // namespace slopeland::sim
