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
// Windowed risk-feature extraction from received-signal-strength samples.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ptsim/radio.hpp"
#include "ptsim/util.hpp"

namespace ptsim {

inline constexpr size_t kFeatureCount = 5;

// Canonical feature order; every consumer indexes features this way.
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "n_samples", "mean_rss", "max_rss", "min_rss", "rss_range"};

struct FeatureVector {
  double n_samples = 0.0;
  double mean_rss = 0.0;
  double max_rss = 0.0;
  double min_rss = 0.0;
  double rss_range = 0.0;
  int label = -1;  // +1 close contact, -1 otherwise

  std::array<double, kFeatureCount> values() const {
    return {n_samples, mean_rss, max_rss, min_rss, rss_range};
  }
};

struct WindowingPolicy {
  int64_t window_ms = 10'000;
  int64_t stride_ms = 10'000;
  size_t min_samples = 1;
  // Keep at most this many samples per window, earliest first; 0 = no cap.
  size_t max_samples_per_window = 0;
  // Moving-average prefilter width applied to the RSS series before
  // windowing; values <= 1 leave the series untouched.
  size_t smooth_window = 0;

  void validate() const {
    if (window_ms <= 0) throw std::invalid_argument("window_ms must be > 0");
    if (stride_ms <= 0 || stride_ms > window_ms) {
      throw std::invalid_argument("need 0 < stride_ms <= window_ms");
    }
    if (min_samples == 0) {
      throw std::invalid_argument("min_samples must be >= 1");
    }
  }
};

struct RiskPolicy {
  double close_threshold_m = 2.0;

  void validate() const {
    if (!(close_threshold_m > 0.0)) {
      throw std::invalid_argument("close_threshold_m must be > 0");
    }
  }
};

// Close contact means the window's median true distance is strictly under
// the threshold; a median exactly at the threshold is labeled -1.
inline int label_risk(const std::vector<double>& true_distances_m,
                      const RiskPolicy& policy) {
  policy.validate();
  if (true_distances_m.empty()) {
    throw std::invalid_argument("cannot label an empty window");
  }
  return median(true_distances_m) < policy.close_threshold_m ? 1 : -1;
}

// Summarizes one window of RSS values; distances drive only the label.
inline FeatureVector summarize_window(const std::vector<double>& rss_dbm,
                                      const std::vector<double>& true_distances_m,
                                      const RiskPolicy& risk) {
  if (rss_dbm.empty() || rss_dbm.size() != true_distances_m.size()) {
    throw std::invalid_argument("window arrays must be non-empty and equal");
  }
  FeatureVector f;
  f.n_samples = static_cast<double>(rss_dbm.size());
  double sum = 0.0;
  double lo = rss_dbm.front();
  double hi = rss_dbm.front();
  for (double v : rss_dbm) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  f.mean_rss = sum / f.n_samples;
  f.max_rss = hi;
  f.min_rss = lo;
  f.rss_range = hi - lo;
  f.label = label_risk(true_distances_m, risk);
  return f;
}

// Cuts a sample stream into tumbling/striding windows anchored at the first
// timestamp: window k covers [t0 + k*stride, t0 + k*stride + window).
// Windows with fewer than min_samples samples are dropped. When a cap is
// set, only the earliest samples of each window are kept.
inline std::vector<FeatureVector> extract_features(
    std::vector<RssSample> samples, const WindowingPolicy& windowing,
    const RiskPolicy& risk) {
  windowing.validate();
  risk.validate();
  if (samples.empty()) return {};
  std::stable_sort(samples.begin(), samples.end(),
                   [](const RssSample& a, const RssSample& b) {
                     return a.timestamp_ms < b.timestamp_ms;
                   });
  if (windowing.smooth_window > 1) {
    std::vector<double> series;
    series.reserve(samples.size());
    for (const RssSample& s : samples) series.push_back(s.rss_dbm);
    series = moving_average(series, windowing.smooth_window);
    for (size_t i = 0; i < samples.size(); ++i) samples[i].rss_dbm = series[i];
  }

  const int64_t t0 = samples.front().timestamp_ms;
  const int64_t span = samples.back().timestamp_ms - t0;
  std::vector<FeatureVector> out;
  for (int64_t start = t0;; start += windowing.stride_ms) {
    if (start > t0 + span) break;
    const int64_t end = start + windowing.window_ms;
    auto first = std::lower_bound(samples.begin(), samples.end(), start,
                                  [](const RssSample& s, int64_t t) {
                                    return s.timestamp_ms < t;
                                  });
    std::vector<double> rss;
    std::vector<double> dist;
    for (auto it = first; it != samples.end() && it->timestamp_ms < end; ++it) {
      if (windowing.max_samples_per_window != 0 &&
          rss.size() >= windowing.max_samples_per_window) {
        break;
      }
      rss.push_back(it->rss_dbm);
      dist.push_back(it->true_distance_m);
    }
    if (rss.size() >= windowing.min_samples) {
      out.push_back(summarize_window(rss, dist, risk));
    }
  }
  return out;
}

}  // namespace ptsim
