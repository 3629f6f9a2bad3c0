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
// Per-device broadcast/scan/match state machine.
//
// Each device periodically generates a fresh 31-byte signature, broadcasts
// it on a fixed advertising schedule, and listens during duty-cycled scan
// windows. Observed packets are appended to a local contact log. When a
// device is diagnosed, it publishes only its own past signatures; every
// other device matches that bundle against its local log, so no identity
// or location ever needs to leave a device.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptsim/rng.hpp"
#include "ptsim/util.hpp"

namespace ptsim {

inline constexpr size_t kSignatureBytes = 31;

using Payload = std::array<uint8_t, kSignatureBytes>;

struct Signature {
  Payload payload{};
  int64_t generated_at_ms = 0;
  int64_t valid_for_ms = 0;
};

struct ProtocolTimings {
  int64_t t_gen_ms = 600'000;  // signature rotation period
  int64_t t_adv_ms = 100;      // advertising interval
  int64_t t_scan_ms = 1'000;   // scan interval
  int64_t t_window_ms = 500;   // active listening window per scan interval

  void validate() const {
    if (!(t_adv_ms > 0)) throw std::invalid_argument("t_adv_ms must be > 0");
    if (!(t_window_ms > 0 && t_window_ms <= t_scan_ms)) {
      throw std::invalid_argument("need 0 < t_window_ms <= t_scan_ms");
    }
    if (t_gen_ms < t_adv_ms) {
      throw std::invalid_argument("t_gen_ms must be >= t_adv_ms");
    }
  }
};

struct ContactLogEntry {
  Payload observed_payload{};
  double rss_dbm = 0.0;
  int64_t timestamp_ms = 0;
};

// device_id is a simulator-only handle used for reports; it is never
// placed in a payload, a broadcast, or a published bundle.
struct DeviceState {
  std::string device_id;
  ProtocolTimings timings;
  int retention_days = 14;

  std::vector<Signature> own_signatures;
  std::vector<ContactLogEntry> contact_log;
  uint64_t malformed_packets = 0;

  int64_t retention_ms() const {
    return static_cast<int64_t>(retention_days) * 24 * 3600 * 1000;
  }

  const Signature& current_signature() const {
    if (own_signatures.empty()) {
      throw std::logic_error("device has no signature yet");
    }
    return own_signatures.back();
  }
};

struct InfectedBundle {
  std::vector<Signature> signatures;
};

enum class EventKind { Generate, ScanClose, Advertise, ScanOpen };

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Generate: return "generate";
    case EventKind::ScanClose: return "scan_close";
    case EventKind::Advertise: return "advertise";
    case EventKind::ScanOpen: return "scan_open";
  }
  return "?";
}

struct ProtocolEvent {
  int64_t timestamp_ms = 0;
  EventKind kind = EventKind::Advertise;
};

// Draws a fresh random 31-byte payload and appends it to own_signatures.
// Subsequent broadcasts carry it until the next rotation.
inline const Signature& generate_signature(DeviceState& device,
                                           int64_t now_ms, Rng& rng) {
  Signature sig;
  for (auto& b : sig.payload) b = static_cast<uint8_t>(rng() & 0xff);
  sig.generated_at_ms = now_ms;
  sig.valid_for_ms = device.timings.t_gen_ms;
  device.own_signatures.push_back(sig);
  return device.own_signatures.back();
}

// True when t falls inside one of the periodic scan windows
// [k*t_scan, k*t_scan + t_window).
inline bool in_scan_window(const ProtocolTimings& timings, int64_t t_ms) {
  if (t_ms < 0) return false;
  return (t_ms % timings.t_scan_ms) < timings.t_window_ms;
}

// All protocol events of one device with timestamps inside [0, horizon).
//
// The device owns a single radio: an advertise whose slot falls inside one
// of its own open scan windows is deferred to that window's close instant
// and ordered just after the ScanClose event. Under continuous scanning
// (t_window == t_scan) there is no closed-window time, so slots stay on
// the t_adv grid; boundary-aligned advertises still order between the
// closing and opening window. Events sharing a timestamp order as
// Generate, ScanClose, Advertise, ScanOpen, so a rotation precedes the
// broadcast that first carries it. Deferrals landing at or past the
// horizon are dropped, as are scan windows whose close lies past it.
inline std::vector<ProtocolEvent> next_events(const DeviceState& device,
                                              int64_t horizon_ms) {
  if (horizon_ms <= 0) {
    throw std::invalid_argument("horizon_ms must be > 0");
  }
  const ProtocolTimings& t = device.timings;
  t.validate();
  const bool continuous = t.t_window_ms == t.t_scan_ms;
  std::vector<ProtocolEvent> events;
  for (int64_t ts = 0; ts < horizon_ms; ts += t.t_gen_ms) {
    events.push_back({ts, EventKind::Generate});
  }
  for (int64_t slot = 0; slot < horizon_ms; slot += t.t_adv_ms) {
    int64_t when = slot;
    if (!continuous) {
      int64_t phase = slot % t.t_scan_ms;
      if (phase < t.t_window_ms) when = slot - phase + t.t_window_ms;
    }
    if (when < horizon_ms) events.push_back({when, EventKind::Advertise});
  }
  for (int64_t open = 0; open + t.t_window_ms <= horizon_ms;
       open += t.t_scan_ms) {
    events.push_back({open, EventKind::ScanOpen});
    events.push_back({open + t.t_window_ms, EventKind::ScanClose});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ProtocolEvent& a, const ProtocolEvent& b) {
                     if (a.timestamp_ms != b.timestamp_ms) {
                       return a.timestamp_ms < b.timestamp_ms;
                     }
                     return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                   });
  return events;
}

// Logs an incoming packet iff the device is inside an open scan window.
// Malformed payloads (wrong length) are counted and dropped. Returns true
// when an entry was appended.
inline bool receive(DeviceState& device, std::span<const uint8_t> payload,
                    double rss_dbm, int64_t now_ms) {
  if (payload.size() != kSignatureBytes) {
    ++device.malformed_packets;
    return false;
  }
  if (!in_scan_window(device.timings, now_ms)) return false;
  ContactLogEntry entry;
  std::copy(payload.begin(), payload.end(), entry.observed_payload.begin());
  entry.rss_dbm = rss_dbm;
  entry.timestamp_ms = now_ms;
  // Arrivals normally come in time order; keep the log sorted regardless.
  if (!device.contact_log.empty() &&
      device.contact_log.back().timestamp_ms > now_ms) {
    auto pos = std::upper_bound(
        device.contact_log.begin(), device.contact_log.end(), now_ms,
        [](int64_t ts, const ContactLogEntry& e) { return ts < e.timestamp_ms; });
    device.contact_log.insert(pos, entry);
  } else {
    device.contact_log.push_back(entry);
  }
  return true;
}

// Drops own signatures and log entries at or beyond the retention
// boundary; the kept range is the half-open (now - retention, now].
inline void prune_retention(DeviceState& device, int64_t now_ms) {
  int64_t cutoff = now_ms - device.retention_ms();
  std::erase_if(device.own_signatures, [cutoff](const Signature& s) {
    return s.generated_at_ms <= cutoff;
  });
  std::erase_if(device.contact_log, [cutoff](const ContactLogEntry& e) {
    return e.timestamp_ms <= cutoff;
  });
}

// The publication step: only the device's own signatures from the
// retention window. The contact log never leaves the device.
inline InfectedBundle publish_infected(const DeviceState& device,
                                       int64_t now_ms) {
  InfectedBundle bundle;
  int64_t cutoff = now_ms - device.retention_ms();
  for (const Signature& s : device.own_signatures) {
    if (s.generated_at_ms > cutoff) bundle.signatures.push_back(s);
  }
  return bundle;
}

struct ExposureMatch {
  Payload payload{};
  int64_t first_seen_ms = 0;
  int64_t last_seen_ms = 0;
  size_t sample_count = 0;
};

// Byte-exact intersection of the downloaded bundle with the local contact
// log, aggregated per payload. Runs entirely on local state. Results are
// ordered by first local observation, then payload bytes.
inline std::vector<ExposureMatch> match_exposure(const DeviceState& device,
                                                 const InfectedBundle& bundle) {
  std::vector<Payload> wanted;
  wanted.reserve(bundle.signatures.size());
  for (const Signature& s : bundle.signatures) wanted.push_back(s.payload);
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  std::vector<ExposureMatch> matches;
  for (const ContactLogEntry& e : device.contact_log) {
    if (!std::binary_search(wanted.begin(), wanted.end(),
                            e.observed_payload)) {
      continue;
    }
    auto it = std::find_if(matches.begin(), matches.end(),
                           [&](const ExposureMatch& m) {
                             return m.payload == e.observed_payload;
                           });
    if (it == matches.end()) {
      matches.push_back({e.observed_payload, e.timestamp_ms, e.timestamp_ms, 1});
    } else {
      it->first_seen_ms = std::min(it->first_seen_ms, e.timestamp_ms);
      it->last_seen_ms = std::max(it->last_seen_ms, e.timestamp_ms);
      ++it->sample_count;
    }
  }
  std::sort(matches.begin(), matches.end(),
            [](const ExposureMatch& a, const ExposureMatch& b) {
              if (a.first_seen_ms != b.first_seen_ms) {
                return a.first_seen_ms < b.first_seen_ms;
              }
              return a.payload < b.payload;
            });
  return matches;
}

}  // namespace ptsim
