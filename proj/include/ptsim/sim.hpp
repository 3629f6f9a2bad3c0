// Copyright 2026 The ptsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Discrete-event loop tying the broadcast/scan schedules to the radio
// channel, plus the two packaged experiments: the stepped-distance
// replication study and the multi-agent outbreak drill.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ptsim/features.hpp"
#include "ptsim/protocol.hpp"
#include "ptsim/radio.hpp"
#include "ptsim/rng.hpp"
#include "ptsim/scenario.hpp"

namespace ptsim {

// Two agents can share a position; the channel still needs a strictly
// positive distance, so separations collapse to this floor.
inline constexpr double kMinSimDistance = 0.05;

struct SimResult {
  std::vector<DeviceState> devices;
  // Ground-truth view of every packet each device actually logged, index-
  // aligned with devices. The devices' own logs carry no distances.
  std::vector<std::vector<RssSample>> received;
};

// Advances every device through its schedule. For each advertise the
// sender's current signature is offered to every other device; a packet is
// logged when the listener's scan window is open and the pair is within
// broadcast range. Signature streams are keyed by device position in the
// list, never by device_id, so renaming devices cannot change payloads.
inline SimResult run_protocol(std::vector<DeviceState> devices,
                              const std::vector<Trajectory>& trajectories,
                              const std::vector<Wrist>& wrists,
                              const ChannelParams& channel,
                              double crosswise_shadow_sigma_db,
                              int64_t horizon_ms, uint64_t seed) {
  if (devices.empty() || trajectories.size() != devices.size() ||
      wrists.size() != devices.size()) {
    throw std::invalid_argument("devices/trajectories/wrists sizes differ");
  }
  if (horizon_ms <= 0) throw std::invalid_argument("horizon_ms must be > 0");
  channel.validate();
  for (const Trajectory& t : trajectories) t.validate(horizon_ms);

  struct GlobalEvent {
    int64_t t;
    int kind;
    size_t dev;
  };
  std::vector<GlobalEvent> timeline;
  for (size_t i = 0; i < devices.size(); ++i) {
    for (const ProtocolEvent& e : next_events(devices[i], horizon_ms)) {
      timeline.push_back({e.timestamp_ms, static_cast<int>(e.kind), i});
    }
  }
  std::sort(timeline.begin(), timeline.end(),
            [](const GlobalEvent& a, const GlobalEvent& b) {
              if (a.t != b.t) return a.t < b.t;
              if (a.kind != b.kind) return a.kind < b.kind;
              return a.dev < b.dev;
            });

  std::vector<Rng> signature_rng;
  signature_rng.reserve(devices.size());
  for (size_t i = 0; i < devices.size(); ++i) {
    signature_rng.push_back(make_stream(seed, 0x516e, i));
  }
  Rng channel_rng = make_stream(seed, 0xc4a7);

  SimResult result;
  result.received.resize(devices.size());

  ChannelParams crosswise_channel = channel;
  crosswise_channel.shadow_sigma_db = crosswise_shadow_sigma_db;

  for (const GlobalEvent& ev : timeline) {
    auto kind = static_cast<EventKind>(ev.kind);
    DeviceState& sender = devices[ev.dev];
    if (kind == EventKind::Generate) {
      generate_signature(sender, ev.t, signature_rng[ev.dev]);
      prune_retention(sender, ev.t);
      continue;
    }
    if (kind != EventKind::Advertise) continue;

    const Signature& sig = sender.current_signature();
    double sender_pos = trajectories[ev.dev].at(ev.t);
    for (size_t j = 0; j < devices.size(); ++j) {
      if (j == ev.dev) continue;
      if (!in_scan_window(devices[j].timings, ev.t)) continue;
      double d = std::abs(sender_pos - trajectories[j].at(ev.t));
      d = std::max(d, kMinSimDistance);
      if (d > channel.broadcast_range_m) continue;
      Geometry geom = pair_geometry(wrists[ev.dev], wrists[j]);
      const ChannelParams& p =
          geom == Geometry::Crosswise ? crosswise_channel : channel;
      double rss = sample_rss(p, d, geom, channel_rng);
      if (receive(devices[j], std::span<const uint8_t>(sig.payload), rss,
                  ev.t)) {
        result.received[j].push_back({d, rss, ev.t, geom});
      }
    }
  }

  result.devices = std::move(devices);
  return result;
}

inline DeviceState make_device(const std::string& id,
                               const ProtocolTimings& timings,
                               int retention_days) {
  DeviceState dev;
  dev.device_id = id;
  dev.timings = timings;
  dev.retention_days = retention_days;
  return dev;
}

// One receiver's view of one distance step, timestamps shifted onto the
// scenario-global clock.
struct StepObservations {
  double distance_m = 0.0;
  Geometry geometry = Geometry::Direct;
  std::string receiver_id;
  std::string sender_id;
  int64_t step_start_ms = 0;
  std::vector<RssSample> samples;
  // Index-aligned with samples: the payload carried by each logged packet.
  std::vector<Payload> payloads;
};

struct GeometryDataset {
  Geometry geometry = Geometry::Direct;
  std::vector<StepObservations> observations;
  std::vector<FeatureVector> features;
  size_t positive_rows = 0;
  size_t negative_rows = 0;
};

struct ReplicationResult {
  GeometryDataset direct;
  GeometryDataset crosswise;
  uint64_t config_hash = 0;
  uint64_t seed = 0;
};

// The stepped-distance study: two agents hold each distance for its dwell
// time, once per wrist geometry. Every step runs an independent protocol
// simulation; features are extracted per receiver per step so windows
// never straddle a distance change.
inline ReplicationResult run_replication(const Scenario& scenario,
                                               const WindowingPolicy& windowing,
                                               const RiskPolicy& risk) {
  if (scenario.mode != ScenarioMode::Replication) {
    throw scenario_error("scenario is not in replication mode");
  }
  scenario.validate();
  windowing.validate();
  risk.validate();

  ReplicationResult result;
  result.config_hash = scenario_hash(scenario);
  result.seed = scenario.seed;

  for (int geo_index = 0; geo_index < 2; ++geo_index) {
    Geometry geometry = geo_index == 0 ? Geometry::Direct : Geometry::Crosswise;
    GeometryDataset dataset;
    dataset.geometry = geometry;
    // Direct = opposite wrists, crosswise = matching wrists.
    std::vector<Wrist> wrists =
        geometry == Geometry::Direct
            ? std::vector<Wrist>{Wrist::Right, Wrist::Left}
            : std::vector<Wrist>{Wrist::Right, Wrist::Right};

    int64_t step_start = 0;
    for (size_t step_index = 0; step_index < scenario.steps.size();
         ++step_index) {
      const DistanceStep& step = scenario.steps[step_index];
      std::vector<DeviceState> devices;
      devices.push_back(
          make_device("A", scenario.timings, scenario.retention_days));
      devices.push_back(
          make_device("B", scenario.timings, scenario.retention_days));
      std::vector<Trajectory> trajectories(2);
      trajectories[0].points = {{0, 0.0}};
      trajectories[1].points = {{0, step.distance_m}};

      uint64_t step_seed = derive_seed(
          scenario.seed, static_cast<uint64_t>(geo_index) + 1, step_index + 1);
      SimResult sim =
          run_protocol(std::move(devices), trajectories, wrists,
                       scenario.channel, scenario.crosswise_shadow_sigma_db,
                       step.dwell_ms, step_seed);

      for (size_t r = 0; r < sim.devices.size(); ++r) {
        StepObservations obs;
        obs.distance_m = step.distance_m;
        obs.geometry = geometry;
        obs.receiver_id = sim.devices[r].device_id;
        obs.sender_id = sim.devices[1 - r].device_id;
        obs.step_start_ms = step_start;
        obs.samples = std::move(sim.received[r]);
        for (RssSample& s : obs.samples) s.timestamp_ms += step_start;
        // Receives are processed in time order, so the contact log lines up
        // one to one with the ground-truth samples.
        obs.payloads.reserve(sim.devices[r].contact_log.size());
        for (const ContactLogEntry& e : sim.devices[r].contact_log) {
          obs.payloads.push_back(e.observed_payload);
        }

        std::vector<FeatureVector> rows =
            extract_features(obs.samples, windowing, risk);
        dataset.features.insert(dataset.features.end(), rows.begin(),
                                rows.end());
        dataset.observations.push_back(std::move(obs));
      }
      step_start += step.dwell_ms;
    }

    for (const FeatureVector& f : dataset.features) {
      (f.label == 1 ? dataset.positive_rows : dataset.negative_rows)++;
    }
    (geometry == Geometry::Direct ? result.direct : result.crosswise) =
        std::move(dataset);
  }
  return result;
}

struct FreeformResult {
  // One entry per receiver covering the whole horizon.
  std::vector<StepObservations> observations;
  std::vector<FeatureVector> features;
  size_t positive_rows = 0;
  size_t negative_rows = 0;
  uint64_t config_hash = 0;
  uint64_t seed = 0;
};

// Freeform scenarios: all agents move along their trajectories in a single
// protocol run, and each receiver's log is windowed exactly as the device
// itself would window it, so windows may straddle motion.
inline FreeformResult run_freeform(const Scenario& scenario,
                                   const WindowingPolicy& windowing,
                                   const RiskPolicy& risk) {
  if (scenario.mode != ScenarioMode::Freeform) {
    throw scenario_error("scenario is not in freeform mode");
  }
  scenario.validate();
  windowing.validate();
  risk.validate();

  FreeformResult result;
  result.config_hash = scenario_hash(scenario);
  result.seed = scenario.seed;

  std::vector<DeviceState> devices;
  std::vector<Trajectory> trajectories;
  std::vector<Wrist> wrists;
  for (const AgentConfig& a : scenario.agents) {
    devices.push_back(
        make_device(a.id, scenario.timings, scenario.retention_days));
    trajectories.push_back(a.trajectory);
    wrists.push_back(a.wrist);
  }
  SimResult sim = run_protocol(std::move(devices), trajectories, wrists,
                               scenario.channel,
                               scenario.crosswise_shadow_sigma_db,
                               scenario.horizon_ms, scenario.seed);

  for (size_t r = 0; r < sim.devices.size(); ++r) {
    StepObservations obs;
    obs.geometry = scenario.agents.size() == 2
                       ? pair_geometry(wrists[r], wrists[1 - r])
                       : Geometry::Direct;
    obs.receiver_id = sim.devices[r].device_id;
    if (scenario.agents.size() == 2) {
      obs.sender_id = sim.devices[1 - r].device_id;
    }
    obs.step_start_ms = 0;
    obs.samples = std::move(sim.received[r]);
    obs.payloads.reserve(sim.devices[r].contact_log.size());
    for (const ContactLogEntry& e : sim.devices[r].contact_log) {
      obs.payloads.push_back(e.observed_payload);
    }

    std::vector<FeatureVector> rows =
        extract_features(obs.samples, windowing, risk);
    result.features.insert(result.features.end(), rows.begin(), rows.end());
    result.observations.push_back(std::move(obs));
  }
  for (const FeatureVector& f : result.features) {
    (f.label == 1 ? result.positive_rows : result.negative_rows)++;
  }
  return result;
}

struct DrillMatch {
  std::string device_id;
  std::vector<ExposureMatch> matches;
};

struct DrillReport {
  std::string infected_id;
  uint64_t config_hash = 0;
  uint64_t seed = 0;
  // One entry per non-infected agent, in scenario order.
  std::vector<DrillMatch> agents;
};

// End-to-end outbreak workflow: run the scenario, publish the infected
// agent's own signatures, and match every other agent's local log against
// that bundle. Only the bundle crosses device boundaries.
inline DrillReport run_outbreak_drill(const Scenario& scenario,
                                      const std::string& infected_id) {
  if (scenario.mode != ScenarioMode::Freeform) {
    throw scenario_error("outbreak drill needs a freeform scenario");
  }
  scenario.validate();

  size_t infected_index = scenario.agents.size();
  std::vector<DeviceState> devices;
  std::vector<Trajectory> trajectories;
  std::vector<Wrist> wrists;
  for (size_t i = 0; i < scenario.agents.size(); ++i) {
    const AgentConfig& a = scenario.agents[i];
    if (a.id == infected_id) infected_index = i;
    devices.push_back(
        make_device(a.id, scenario.timings, scenario.retention_days));
    trajectories.push_back(a.trajectory);
    wrists.push_back(a.wrist);
  }
  if (infected_index == scenario.agents.size()) {
    throw scenario_error("infected agent '" + infected_id +
                         "' is not in the scenario");
  }

  SimResult sim = run_protocol(std::move(devices), trajectories, wrists,
                               scenario.channel,
                               scenario.crosswise_shadow_sigma_db,
                               scenario.horizon_ms, scenario.seed);

  InfectedBundle bundle =
      publish_infected(sim.devices[infected_index], scenario.horizon_ms);

  DrillReport report;
  report.infected_id = infected_id;
  report.config_hash = scenario_hash(scenario);
  report.seed = scenario.seed;
  for (size_t i = 0; i < sim.devices.size(); ++i) {
    if (i == infected_index) continue;
    DrillMatch m;
    m.device_id = sim.devices[i].device_id;
    m.matches = match_exposure(sim.devices[i], bundle);
    report.agents.push_back(std::move(m));
  }
  return report;
}

// The built-in stepped-distance study configuration; scenario files may
// override any field.
inline Scenario make_default_replication(uint64_t seed = 1) {
  Scenario s;
  s.name = "replication-default";
  s.mode = ScenarioMode::Replication;
  s.seed = seed;
  s.channel.rng_seed = seed;
  s.timings.t_window_ms = s.timings.t_scan_ms;  // continuous scanning
  for (int i = 1; i <= 10; ++i) s.steps.push_back({0.5 * i, 120'000});
  return s;
}

}  // namespace ptsim
