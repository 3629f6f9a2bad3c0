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
// Log-distance path-loss channel with Gaussian shadowing, standing in for
// the physical radio link between two wrist-worn devices.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ptsim/rng.hpp"

namespace ptsim {

// Direct: line-of-sight between the two devices.
// Crosswise: signal path blocked by the wearer's body, adding a fixed
// attenuation on top of the distance loss.
enum class Geometry { Direct, Crosswise };

inline const char* geometry_name(Geometry g) {
  return g == Geometry::Direct ? "direct" : "crosswise";
}

struct ChannelParams {
  double ref_rss_dbm = -60.0;    // received power at the 1 m reference
  double path_loss_exp = 2.0;    // environment decay exponent
  double shadow_sigma_db = 4.0;  // std-dev of zero-mean Gaussian shadowing
  double body_atten_db = 6.0;    // extra loss in crosswise geometry
  double broadcast_range_m = 10.0;  // no packet is delivered beyond this
  uint64_t rng_seed = 1;

  void validate() const {
    if (!(path_loss_exp > 0.0)) {
      throw std::invalid_argument("path_loss_exp must be > 0");
    }
    if (shadow_sigma_db < 0.0) {
      throw std::invalid_argument("shadow_sigma_db must be >= 0");
    }
    if (body_atten_db < 0.0) {
      throw std::invalid_argument("body_atten_db must be >= 0");
    }
    if (!(broadcast_range_m > 0.0)) {
      throw std::invalid_argument("broadcast_range_m must be > 0");
    }
  }
};

// One received-packet observation with its ground truth.
struct RssSample {
  double true_distance_m = 0.0;
  double rss_dbm = 0.0;
  int64_t timestamp_ms = 0;
  Geometry geometry = Geometry::Direct;
};

// Noise-free received power at the given distance.
// Strictly decreasing in distance; crosswise is the direct value minus
// the body attenuation.
inline double mean_rss_at(const ChannelParams& params, double distance_m,
                          Geometry geometry) {
  if (!(distance_m > 0.0)) {
    throw std::domain_error("distance must be > 0");
  }
  double rss = params.ref_rss_dbm -
               10.0 * params.path_loss_exp * std::log10(distance_m);
  if (geometry == Geometry::Crosswise) rss -= params.body_atten_db;
  return rss;
}

// One stochastic observation: mean_rss_at plus zero-mean Gaussian
// shadowing. With shadow_sigma_db == 0 this equals mean_rss_at and does
// not advance the generator.
inline double sample_rss(const ChannelParams& params, double distance_m,
                         Geometry geometry, Rng& rng) {
  double mean = mean_rss_at(params, distance_m, geometry);
  return normal_sample(rng, mean, params.shadow_sigma_db);
}

// Moving-average filter. Entry i is the mean of the last min(i+1, window)
// raw values, so the output aligns 1:1 with the input; the warm-up prefix
// averages whatever is available.
inline std::vector<double> moving_average(const std::vector<double>& series,
                                          size_t window) {
  if (window == 0) {
    throw std::domain_error("moving_average window must be >= 1");
  }
  std::vector<double> out;
  out.reserve(series.size());
  double running = 0.0;
  for (size_t i = 0; i < series.size(); ++i) {
    running += series[i];
    if (i >= window) running -= series[i - window];
    size_t n = std::min(i + 1, window);
    out.push_back(running / static_cast<double>(n));
  }
  return out;
}

}  // namespace ptsim
