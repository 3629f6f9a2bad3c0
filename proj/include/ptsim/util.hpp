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

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ptsim/errors.hpp"

namespace ptsim {

inline std::string to_hex(const uint8_t* data, size_t len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (size_t i = 0; i < len; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0x0f]);
  }
  return out;
}

template <size_t N>
std::string to_hex(const std::array<uint8_t, N>& bytes) {
  return to_hex(bytes.data(), N);
}

inline std::vector<uint8_t> from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) {
    throw format_error("hex string has odd length");
  }
  std::vector<uint8_t> out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw format_error("invalid hex digit in '" + std::string(hex) + "'");
    }
    out[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return out;
}

// FNV-1a, used for config provenance hashes in output headers.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw degenerate_data_error("median of empty set");
  size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + (n - 1) / 2, v.end());
  double lo = v[(n - 1) / 2];
  if (n % 2 == 1) return lo;
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  return 0.5 * (lo + v[n / 2]);
}

// Linear-interpolation quantile on a sorted copy, q in [0, 1].
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw degenerate_data_error("quantile of empty set");
  std::sort(v.begin(), v.end());
  double h = q * static_cast<double>(v.size() - 1);
  size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace ptsim
