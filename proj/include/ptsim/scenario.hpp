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
// Scenario configuration: JSON schema, validation, canonical form, and
// config hashing. Two modes exist. "replication" walks two agents through
// a stepped distance schedule in both wrist geometries; "freeform" runs
// arbitrary agents on piecewise-linear position trajectories.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptsim/errors.hpp"
#include "ptsim/protocol.hpp"
#include "ptsim/radio.hpp"
#include "ptsim/util.hpp"

namespace ptsim {

enum class ScenarioMode { Replication, Freeform };

inline const char* scenario_mode_name(ScenarioMode m) {
  return m == ScenarioMode::Replication ? "replication" : "freeform";
}

struct DistanceStep {
  double distance_m = 0.0;
  int64_t dwell_ms = 0;
};

struct TrajectoryPoint {
  int64_t t_ms = 0;
  double pos_m = 0.0;
};

// Piecewise-linear scalar position over time. A single point means the
// agent never moves. Distances between agents are |pos_a - pos_b|.
struct Trajectory {
  std::vector<TrajectoryPoint> points;

  void validate(int64_t horizon_ms) const {
    if (points.empty()) throw scenario_error("trajectory has no points");
    if (points.front().t_ms != 0) {
      throw scenario_error("trajectory must start at t_ms = 0");
    }
    for (size_t i = 1; i < points.size(); ++i) {
      if (points[i].t_ms <= points[i - 1].t_ms) {
        throw scenario_error("trajectory timestamps must strictly increase");
      }
    }
    if (points.size() > 1 && points.back().t_ms < horizon_ms) {
      throw scenario_error("trajectory ends before the horizon");
    }
  }

  double at(int64_t t_ms) const {
    if (points.size() == 1) return points.front().pos_m;
    if (t_ms <= points.front().t_ms) return points.front().pos_m;
    if (t_ms >= points.back().t_ms) return points.back().pos_m;
    for (size_t i = 1; i < points.size(); ++i) {
      if (t_ms > points[i].t_ms) continue;
      const auto& a = points[i - 1];
      const auto& b = points[i];
      double frac = static_cast<double>(t_ms - a.t_ms) /
                    static_cast<double>(b.t_ms - a.t_ms);
      return a.pos_m + frac * (b.pos_m - a.pos_m);
    }
    return points.back().pos_m;
  }
};

enum class Wrist { Left, Right };

inline const char* wrist_name(Wrist w) {
  return w == Wrist::Left ? "left" : "right";
}

struct AgentConfig {
  std::string id;
  Wrist wrist = Wrist::Right;
  Trajectory trajectory;
};

// Same-wrist pairs see each other through the wearer's body.
inline Geometry pair_geometry(Wrist a, Wrist b) {
  return a == b ? Geometry::Crosswise : Geometry::Direct;
}

struct Scenario {
  std::string name = "scenario";
  ScenarioMode mode = ScenarioMode::Replication;
  uint64_t seed = 1;
  ChannelParams channel;
  // Shadowing spread used for crosswise pairs; body blockage both weakens
  // and destabilizes the path, so the default is wider than the direct
  // channel's sigma.
  double crosswise_shadow_sigma_db = 6.0;
  ProtocolTimings timings;
  int retention_days = 14;
  std::vector<DistanceStep> steps;    // replication mode
  int64_t horizon_ms = 0;             // freeform mode
  std::vector<AgentConfig> agents;    // freeform mode

  void validate() const {
    try {
      channel.validate();
      timings.validate();
    } catch (const std::invalid_argument& e) {
      throw scenario_error(e.what());
    }
    if (!(crosswise_shadow_sigma_db >= 0.0)) {
      throw scenario_error("crosswise_shadow_sigma_db must be >= 0");
    }
    if (retention_days <= 0) {
      throw scenario_error("retention_days must be >= 1");
    }
    if (mode == ScenarioMode::Replication) {
      if (steps.empty()) {
        throw scenario_error("replication scenario needs distance steps");
      }
      for (const DistanceStep& s : steps) {
        if (!(s.distance_m > 0.0 &&
              s.distance_m <= channel.broadcast_range_m)) {
          throw scenario_error(
              "step distances must lie in (0, broadcast_range_m]");
        }
        if (s.dwell_ms <= 0) throw scenario_error("dwell_ms must be > 0");
      }
    } else {
      if (horizon_ms <= 0) {
        throw scenario_error("freeform scenario needs horizon_ms > 0");
      }
      if (agents.size() < 2) {
        throw scenario_error("freeform scenario needs at least two agents");
      }
      for (const AgentConfig& a : agents) {
        if (a.id.empty()) throw scenario_error("agent id must be non-empty");
        a.trajectory.validate(horizon_ms);
      }
      for (size_t i = 0; i < agents.size(); ++i) {
        for (size_t j = i + 1; j < agents.size(); ++j) {
          if (agents[i].id == agents[j].id) {
            throw scenario_error("duplicate agent id '" + agents[i].id + "'");
          }
        }
      }
    }
  }

  // Conditions that run but deserve operator attention.
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    if (mode == ScenarioMode::Replication) {
      for (const DistanceStep& s : steps) {
        if (s.dwell_ms < timings.t_scan_ms) {
          out.push_back("step at " + std::to_string(s.distance_m) +
                        " m dwells shorter than one scan interval and may "
                        "yield no windows");
        }
      }
    }
    return out;
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> known,
                                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw scenario_error("unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
  if (!j.is_object()) throw scenario_error("scenario root must be an object");
  detail::reject_unknown_keys(
      j,
      {"name", "mode", "seed", "channel", "crosswise_shadow_sigma_db",
       "timings", "retention_days", "steps", "horizon_ms", "agents"},
      "scenario");
  Scenario s;
  try {
    s.name = j.value("name", s.name);
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "replication") {
      s.mode = ScenarioMode::Replication;
    } else if (mode == "freeform") {
      s.mode = ScenarioMode::Freeform;
    } else {
      throw scenario_error("mode must be 'replication' or 'freeform'");
    }
    s.seed = j.value("seed", s.seed);
    if (j.contains("channel")) {
      const auto& c = j.at("channel");
      detail::reject_unknown_keys(c,
                                  {"ref_rss_dbm", "path_loss_exp",
                                   "shadow_sigma_db", "body_atten_db",
                                   "broadcast_range_m"},
                                  "channel");
      s.channel.ref_rss_dbm = c.value("ref_rss_dbm", s.channel.ref_rss_dbm);
      s.channel.path_loss_exp =
          c.value("path_loss_exp", s.channel.path_loss_exp);
      s.channel.shadow_sigma_db =
          c.value("shadow_sigma_db", s.channel.shadow_sigma_db);
      s.channel.body_atten_db =
          c.value("body_atten_db", s.channel.body_atten_db);
      s.channel.broadcast_range_m =
          c.value("broadcast_range_m", s.channel.broadcast_range_m);
    }
    s.channel.rng_seed = s.seed;
    s.crosswise_shadow_sigma_db =
        j.value("crosswise_shadow_sigma_db", s.crosswise_shadow_sigma_db);
    if (j.contains("timings")) {
      const auto& t = j.at("timings");
      detail::reject_unknown_keys(
          t, {"t_gen_ms", "t_adv_ms", "t_scan_ms", "t_window_ms"}, "timings");
      s.timings.t_gen_ms = t.value("t_gen_ms", s.timings.t_gen_ms);
      s.timings.t_adv_ms = t.value("t_adv_ms", s.timings.t_adv_ms);
      s.timings.t_scan_ms = t.value("t_scan_ms", s.timings.t_scan_ms);
      s.timings.t_window_ms = t.value("t_window_ms", s.timings.t_window_ms);
    }
    s.retention_days = j.value("retention_days", s.retention_days);
    if (s.mode == ScenarioMode::Replication) {
      if (j.contains("steps")) {
        for (const auto& js : j.at("steps")) {
          detail::reject_unknown_keys(js, {"distance_m", "dwell_ms"}, "step");
          DistanceStep step;
          step.distance_m = js.at("distance_m").get<double>();
          step.dwell_ms = js.at("dwell_ms").get<int64_t>();
          s.steps.push_back(step);
        }
      } else {
        for (int i = 1; i <= 10; ++i) {
          s.steps.push_back({0.5 * i, 120'000});
        }
      }
    } else {
      s.horizon_ms = j.at("horizon_ms").get<int64_t>();
      for (const auto& ja : j.at("agents")) {
        detail::reject_unknown_keys(ja, {"id", "wrist", "trajectory"},
                                    "agent");
        AgentConfig a;
        a.id = ja.at("id").get<std::string>();
        std::string wrist = ja.value("wrist", "right");
        if (wrist == "left") {
          a.wrist = Wrist::Left;
        } else if (wrist == "right") {
          a.wrist = Wrist::Right;
        } else {
          throw scenario_error("wrist must be 'left' or 'right'");
        }
        for (const auto& jp : ja.at("trajectory")) {
          detail::reject_unknown_keys(jp, {"t_ms", "pos_m"}, "trajectory");
          a.trajectory.points.push_back({jp.at("t_ms").get<int64_t>(),
                                         jp.at("pos_m").get<double>()});
        }
        s.agents.push_back(std::move(a));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw scenario_error(std::string("scenario is malformed: ") + e.what());
  }
  s.validate();
  return s;
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["mode"] = scenario_mode_name(s.mode);
  j["seed"] = s.seed;
  j["channel"] = {{"ref_rss_dbm", s.channel.ref_rss_dbm},
                  {"path_loss_exp", s.channel.path_loss_exp},
                  {"shadow_sigma_db", s.channel.shadow_sigma_db},
                  {"body_atten_db", s.channel.body_atten_db},
                  {"broadcast_range_m", s.channel.broadcast_range_m}};
  j["crosswise_shadow_sigma_db"] = s.crosswise_shadow_sigma_db;
  j["timings"] = {{"t_gen_ms", s.timings.t_gen_ms},
                  {"t_adv_ms", s.timings.t_adv_ms},
                  {"t_scan_ms", s.timings.t_scan_ms},
                  {"t_window_ms", s.timings.t_window_ms}};
  j["retention_days"] = s.retention_days;
  if (s.mode == ScenarioMode::Replication) {
    nlohmann::json steps = nlohmann::json::array();
    for (const DistanceStep& step : s.steps) {
      steps.push_back(
          {{"distance_m", step.distance_m}, {"dwell_ms", step.dwell_ms}});
    }
    j["steps"] = steps;
  } else {
    j["horizon_ms"] = s.horizon_ms;
    nlohmann::json agents = nlohmann::json::array();
    for (const AgentConfig& a : s.agents) {
      nlohmann::json traj = nlohmann::json::array();
      for (const TrajectoryPoint& p : a.trajectory.points) {
        traj.push_back({{"t_ms", p.t_ms}, {"pos_m", p.pos_m}});
      }
      agents.push_back(
          {{"id", a.id}, {"wrist", wrist_name(a.wrist)}, {"trajectory", traj}});
    }
    j["agents"] = agents;
  }
  return j;
}

// Canonical text form (sorted keys, fixed indentation); the basis for the
// config hash embedded in every output artifact.
inline std::string canonical_scenario_text(const Scenario& s) {
  return scenario_to_json(s).dump(2) + "\n";
}

inline uint64_t scenario_hash(const Scenario& s) {
  return fnv1a64(canonical_scenario_text(s));
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw scenario_error("cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw scenario_error("scenario '" + path + "' is not valid JSON: " +
                         e.what());
  }
  return parse_scenario(j);
}

}  // namespace ptsim
