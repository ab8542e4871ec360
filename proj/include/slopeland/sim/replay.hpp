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

// Offline re-run of the estimator over a recorded telemetry log.

#pragma once

#include <istream>
#include <string>

#include "slopeland/sim/config.hpp"
#include "slopeland/sim/estimator.hpp"
#include "slopeland/sim/pipeline.hpp"
#include "slopeland/sim/telemetry.hpp"

namespace slopeland::sim {

inline RunReport replay(const TelemetryLog& log, const ScenarioConfig& config) {
  validate(config);
  RunReport r;
  r.config = config;
  r.replayed = true;
  r.partial = log.truncated;
  r.incline_true_deg = config.world.incline_deg;
  Estimator est(EstimatorSetup::from_config(config));
  long tau_mismatch = 0, event_mismatch = 0;
  for (const TelemetryRow& row : log.rows) {
    if (r.timeline.empty() || r.timeline.back().second != row.phase) {
      r.timeline.push_back({row.t, row.phase});
    }
    const EstimatorStep step = est.process(row);
    if (step.tau_hat != row.tau_hat) ++tau_mismatch;
    const int arm = step.event ? step.event->arm_id : 0;
    if ((step.event ? 1 : 0) != row.event_flag || arm != row.event_arm) ++event_mismatch;
    r.sim_time = row.t;
  }
  r.events = est.events();
  if (est.plane_ready()) {
    try {
      r.plane = est.plane();
    } catch (const DegenerateGeometryError& e) {
      r.warnings.push_back(std::string("plane estimate failed: ") + e.what());
    }
  }
  r.outcome = log.rows.empty() ? Phase::kApproach : log.rows.back().phase;
  for (const std::string& w : est.warnings()) r.warnings.push_back(w);
  if (tau_mismatch > 0) {
    r.warnings.push_back(std::to_string(tau_mismatch) + " rows differ from the logged tau_hat");
  }
  if (event_mismatch > 0) {
    r.warnings.push_back(std::to_string(event_mismatch) + " rows differ from the logged events");
  }
  if (log.truncated) r.warnings.push_back("log truncated; last partial row dropped");
  return r;
}

inline RunReport replay(std::istream& in, const ScenarioConfig& config) {
  return replay(read_telemetry(in), config);
}

}  // namespace slopeland::sim
