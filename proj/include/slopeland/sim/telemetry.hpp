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

// Telemetry CSV: one row per control step.
//
//   t, px, py, pz, roll, pitch, yaw, wx, wy, wz, u1..u4,
//   a1_q1..a1_q3, a1_qd1..a1_qd3, a2_q1..a2_qd3, tau_x, tau_y, tau_z,
//   phase, event_flag, event_arm
//
// Position is world NED (m), attitude Z-Y-X roll/pitch/yaw (rad), omega the
// measured body rate (rad/s), u the rotor thrusts applied over the step (N),
// qd the joint rates applied over the step. phase is the phase the sample
// was taken in, which decides whether detection is armed.

#pragma once

#include <array>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include "slopeland/errors.hpp"
#include "slopeland/sim/plant.hpp"
#include "slopeland/sim/text.hpp"

namespace slopeland::sim {

struct TelemetryRow {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  EulerRPY rpy;
  Vec3 omega = Vec3::Zero();
  Vec4 u = Vec4::Zero();
  std::array<JointConfig, kArmCount> q{};
  std::array<JointVelocity, kArmCount> qd{};
  Vec3 tau_hat = Vec3::Zero();
  Phase phase = Phase::kApproach;
  int event_flag = 0;
  int event_arm = 0;
};

inline bool operator==(const TelemetryRow& a, const TelemetryRow& b) {
  auto same_arm = [](const JointConfig& x, const JointConfig& y) { return x.vec() == y.vec(); };
  for (int i = 0; i < kArmCount; ++i) {
    if (!same_arm(a.q[i], b.q[i]) || a.qd[i].vec() != b.qd[i].vec()) return false;
  }
  return a.t == b.t && a.p == b.p && a.rpy.roll == b.rpy.roll && a.rpy.pitch == b.rpy.pitch &&
         a.rpy.yaw == b.rpy.yaw && a.omega == b.omega && a.u == b.u && a.tau_hat == b.tau_hat &&
         a.phase == b.phase && a.event_flag == b.event_flag && a.event_arm == b.event_arm;
}

inline const std::vector<std::string>& telemetry_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = {"t",  "px", "py", "pz", "roll", "pitch", "yaw",
                                  "wx", "wy", "wz", "u1", "u2",   "u3",    "u4"};
    for (int a = 1; a <= kArmCount; ++a) {
      for (const char* kind : {"q", "qd"}) {
        for (int j = 1; j <= 3; ++j) {
          c.push_back("a" + std::to_string(a) + "_" + kind + std::to_string(j));
        }
      }
    }
    for (const char* s : {"tau_x", "tau_y", "tau_z", "phase", "event_flag", "event_arm"}) {
      c.push_back(s);
    }
    return c;
  }();
  return cols;
}

inline std::string telemetry_header() {
  std::string h;
  for (const std::string& c : telemetry_columns()) {
    if (!h.empty()) h += ',';
    h += c;
  }
  return h;
}

inline std::string format_row(const TelemetryRow& r) {
  std::string s;
  auto put = [&](double v) {
    s += format_double(v);
    s += ',';
  };
  put(r.t);
  for (int i = 0; i < 3; ++i) put(r.p[i]);
  put(r.rpy.roll);
  put(r.rpy.pitch);
  put(r.rpy.yaw);
  for (int i = 0; i < 3; ++i) put(r.omega[i]);
  for (int i = 0; i < 4; ++i) put(r.u[i]);
  for (int a = 0; a < kArmCount; ++a) {
    for (int j = 0; j < 3; ++j) put(r.q[a][j]);
    const Vec3 qd = r.qd[a].vec();
    for (int j = 0; j < 3; ++j) put(qd[j]);
  }
  for (int i = 0; i < 3; ++i) put(r.tau_hat[i]);
  s += to_string(r.phase);
  s += ',' + std::to_string(r.event_flag) + ',' + std::to_string(r.event_arm);
  return s;
}

inline void write_telemetry(std::ostream& os, const std::vector<TelemetryRow>& rows) {
  os << telemetry_header() << '\n';
  for (const TelemetryRow& r : rows) os << format_row(r) << '\n';
}

// Throws ParseError with `line` on malformed content.
inline TelemetryRow parse_row(std::string_view text, int line) {
  const auto cells = split(text, ',');
  const size_t expected = telemetry_columns().size();
  if (cells.size() != expected) {
    throw ParseError("expected " + std::to_string(expected) + " columns, found " +
                         std::to_string(cells.size()),
                     line);
  }
  size_t col = 0;
  auto num = [&]() {
    auto v = parse_double(cells[col]);
    if (!v) {
      throw ParseError("column '" + telemetry_columns()[col] + "': not a number: '" +
                           std::string(trim(cells[col])) + "'",
                       line);
    }
    ++col;
    return *v;
  };
  TelemetryRow r;
  r.t = num();
  for (int i = 0; i < 3; ++i) r.p[i] = num();
  r.rpy.roll = num();
  r.rpy.pitch = num();
  r.rpy.yaw = num();
  for (int i = 0; i < 3; ++i) r.omega[i] = num();
  for (int i = 0; i < 4; ++i) r.u[i] = num();
  for (int a = 0; a < kArmCount; ++a) {
    Vec3 q, qd;
    for (int j = 0; j < 3; ++j) q[j] = num();
    for (int j = 0; j < 3; ++j) qd[j] = num();
    r.q[a] = JointConfig::from(q);
    r.qd[a] = JointVelocity::from(qd);
  }
  for (int i = 0; i < 3; ++i) r.tau_hat[i] = num();
  try {
    r.phase = phase_from_string(trim(cells[col]));
  } catch (const InvalidArgumentError& e) {
    throw ParseError(std::string("column 'phase': ") + e.what(), line);
  }
  ++col;
  auto flag = parse_int<int>(cells[col]);
  auto arm = parse_int<int>(cells[col + 1]);
  if (!flag || !arm) throw ParseError("event columns must be integers", line);
  r.event_flag = *flag;
  r.event_arm = *arm;
  return r;
}

struct TelemetryLog {
  std::vector<TelemetryRow> rows;
  bool truncated = false;  // the last line was incomplete and dropped
};

// Reads a log. A malformed final line without a trailing newline is treated
// as a truncated write and dropped; anything else malformed, and any
// timestamp that does not increase, is a ParseError.
inline TelemetryLog read_telemetry(std::istream& in) {
  TelemetryLog log;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const bool ends_with_newline = !text.empty() && text.back() == '\n';
  auto lines = split(text, '\n');
  if (ends_with_newline) lines.pop_back();
  if (lines.empty() || trim(lines[0]) != telemetry_header()) {
    throw ParseError("missing or unexpected telemetry header", 1);
  }
  for (size_t i = 1; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    if (trim(lines[i]).empty()) {
      if (i + 1 == lines.size()) break;
      throw ParseError("empty line", line);
    }
    TelemetryRow row;
    try {
      row = parse_row(lines[i], line);
    } catch (const ParseError&) {
      if (i + 1 == lines.size() && !ends_with_newline) {
        log.truncated = true;
        break;
      }
      throw;
    }
    if (!log.rows.empty() && !(row.t > log.rows.back().t)) {
      throw ParseError("timestamp " + format_double(row.t) + " does not increase", line);
    }
    log.rows.push_back(row);
  }
  return log;
}

}  // namespace slopeland::sim
