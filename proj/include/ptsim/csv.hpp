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
// CSV artifacts: observation logs in and out, feature tables, contact-log
// and infected-bundle exports. All writers are locale-free and emit the
// shortest digit strings that round-trip, so identical inputs always
// produce byte-identical files.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "ptsim/errors.hpp"
#include "ptsim/features.hpp"
#include "ptsim/protocol.hpp"
#include "ptsim/util.hpp"

namespace ptsim {

// One row of the raw observation schema:
// distance_m,device_name,mac,payload_hex,rss_dbm,elapsed_ms,timestamp_ms
struct Observation {
  double distance_m = 0.0;
  std::string device_name;
  std::string mac;
  std::string payload_hex;
  double rss_dbm = 0.0;
  int64_t elapsed_ms = 0;
  int64_t timestamp_ms = 0;
};

// Maps each canonical observation column to the header name used by a
// particular file. Numeric columns are required; the descriptive ones may
// be declared absent with an empty name and then default per row.
struct ColumnMapping {
  std::string distance_m = "distance_m";
  std::string device_name = "device_name";
  std::string mac = "mac";
  std::string payload_hex = "payload_hex";
  std::string rss_dbm = "rss_dbm";
  std::string elapsed_ms = "elapsed_ms";
  std::string timestamp_ms = "timestamp_ms";

  void validate() const {
    if (distance_m.empty() || rss_dbm.empty() || timestamp_ms.empty()) {
      throw std::invalid_argument(
          "distance_m, rss_dbm, and timestamp_ms columns cannot be dropped");
    }
  }
};

struct IngestResult {
  std::vector<Observation> observations;
  size_t skipped_rows = 0;
  std::vector<std::string> warnings;
};

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::logic_error("double formatting failed");
  return std::string(buf, end);
}

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

inline bool parse_ms(const std::string& s, int64_t& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec == std::errc() && ptr == end) return true;
  // Some exports write millisecond counters with a fractional part.
  double v = 0.0;
  if (!parse_double(s, v)) return false;
  out = std::llround(v);
  return true;
}

// Minimal RFC 4180 field splitting: double quotes wrap fields containing
// separators, doubled quotes escape a literal quote.
inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_comments(std::ostream& out,
                           const std::vector<std::string>& comments) {
  for (const std::string& c : comments) out << "# " << c << "\n";
}

}  // namespace detail

// Reads the observation schema. Malformed rows are skipped, counted, and
// reported; a missing required column aborts with its name.
inline IngestResult ingest_observations(std::istream& in,
                                        const ColumnMapping& mapping = {}) {
  mapping.validate();
  IngestResult result;
  std::string line;
  size_t line_no = 0;

  // Header: first line that is neither blank nor a comment.
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = detail::split_csv(line);
    break;
  }
  if (header.empty()) throw format_error("observation file has no header");

  auto find = [&](const std::string& name, bool required) {
    if (name.empty()) return -1;
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    if (required) throw format_error("missing column '" + name + "'");
    return -1;
  };
  int col_distance = find(mapping.distance_m, true);
  int col_device = find(mapping.device_name, !mapping.device_name.empty());
  int col_mac = find(mapping.mac, !mapping.mac.empty());
  int col_payload = find(mapping.payload_hex, !mapping.payload_hex.empty());
  int col_rss = find(mapping.rss_dbm, true);
  int col_elapsed = find(mapping.elapsed_ms, !mapping.elapsed_ms.empty());
  int col_timestamp = find(mapping.timestamp_ms, true);

  auto warn = [&](const std::string& what) {
    ++result.skipped_rows;
    result.warnings.push_back("line " + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = detail::split_csv(line);
    int max_col = std::max({col_distance, col_device, col_mac, col_payload,
                            col_rss, col_elapsed, col_timestamp});
    if (static_cast<int>(fields.size()) <= max_col) {
      warn("expected at least " + std::to_string(max_col + 1) + " fields, got " +
           std::to_string(fields.size()));
      continue;
    }
    Observation obs;
    if (!detail::parse_double(fields[size_t(col_distance)], obs.distance_m)) {
      warn("bad distance_m '" + fields[size_t(col_distance)] + "'");
      continue;
    }
    if (!detail::parse_double(fields[size_t(col_rss)], obs.rss_dbm)) {
      warn("bad rss_dbm '" + fields[size_t(col_rss)] + "'");
      continue;
    }
    if (!detail::parse_ms(fields[size_t(col_timestamp)], obs.timestamp_ms)) {
      warn("bad timestamp_ms '" + fields[size_t(col_timestamp)] + "'");
      continue;
    }
    if (col_elapsed >= 0 &&
        !detail::parse_ms(fields[size_t(col_elapsed)], obs.elapsed_ms)) {
      warn("bad elapsed_ms '" + fields[size_t(col_elapsed)] + "'");
      continue;
    }
    if (col_device >= 0) obs.device_name = fields[size_t(col_device)];
    if (col_mac >= 0) obs.mac = fields[size_t(col_mac)];
    if (col_payload >= 0) obs.payload_hex = fields[size_t(col_payload)];
    result.observations.push_back(std::move(obs));
  }
  return result;
}

inline IngestResult read_observations_csv(const std::string& path,
                                          const ColumnMapping& mapping = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw file_error("cannot open '" + path + "'");
  return ingest_observations(in, mapping);
}

inline void write_observations_csv(std::ostream& out,
                                   const std::vector<std::string>& comments,
                                   const std::vector<Observation>& rows) {
  detail::write_comments(out, comments);
  out << "distance_m,device_name,mac,payload_hex,rss_dbm,elapsed_ms,"
         "timestamp_ms\n";
  for (const Observation& o : rows) {
    out << format_double(o.distance_m) << ',' << detail::csv_escape(o.device_name)
        << ',' << detail::csv_escape(o.mac) << ','
        << detail::csv_escape(o.payload_hex) << ',' << format_double(o.rss_dbm)
        << ',' << o.elapsed_ms << ',' << o.timestamp_ms << '\n';
  }
}

// Observations regrouped into per-device sample streams, ordered by device
// name so downstream artifacts are reproducible.
inline std::map<std::string, std::vector<RssSample>> group_by_device(
    const std::vector<Observation>& observations) {
  std::map<std::string, std::vector<RssSample>> groups;
  for (const Observation& o : observations) {
    groups[o.device_name].push_back(
        {o.distance_m, o.rss_dbm, o.timestamp_ms, Geometry::Direct});
  }
  return groups;
}

inline void write_feature_csv(std::ostream& out,
                              const std::vector<std::string>& comments,
                              const std::vector<FeatureVector>& rows) {
  detail::write_comments(out, comments);
  out << "n_samples,mean_rss,max_rss,min_rss,rss_range,label\n";
  for (const FeatureVector& f : rows) {
    out << format_double(f.n_samples) << ',' << format_double(f.mean_rss)
        << ',' << format_double(f.max_rss) << ',' << format_double(f.min_rss)
        << ',' << format_double(f.rss_range) << ',' << f.label << '\n';
  }
}

inline std::vector<FeatureVector> read_feature_csv(std::istream& in) {
  std::string line;
  size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = detail::split_csv(line);
    break;
  }
  const std::vector<std::string> want = {"n_samples", "mean_rss", "max_rss",
                                         "min_rss",   "rss_range", "label"};
  if (header != want) {
    throw format_error(
        "feature file must start with header "
        "'n_samples,mean_rss,max_rss,min_rss,rss_range,label'");
  }
  std::vector<FeatureVector> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = detail::split_csv(line);
    if (fields.size() != want.size()) {
      throw format_error("line " + std::to_string(line_no) +
                         ": expected 6 fields, got " +
                         std::to_string(fields.size()));
    }
    FeatureVector f;
    double label = 0.0;
    if (!detail::parse_double(fields[0], f.n_samples) ||
        !detail::parse_double(fields[1], f.mean_rss) ||
        !detail::parse_double(fields[2], f.max_rss) ||
        !detail::parse_double(fields[3], f.min_rss) ||
        !detail::parse_double(fields[4], f.rss_range) ||
        !detail::parse_double(fields[5], label)) {
      throw format_error("line " + std::to_string(line_no) +
                         ": non-numeric field");
    }
    if (label != 1.0 && label != -1.0) {
      throw format_error("line " + std::to_string(line_no) +
                         ": label must be 1 or -1");
    }
    f.label = label == 1.0 ? 1 : -1;
    rows.push_back(f);
  }
  return rows;
}

inline std::vector<FeatureVector> read_feature_csv_file(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw file_error("cannot open '" + path + "'");
  return read_feature_csv(in);
}

// Local contact log, exactly as a device would persist it: what was heard,
// how loud, and when. No identities.
inline void write_contact_log_csv(std::ostream& out,
                                  const std::vector<std::string>& comments,
                                  const DeviceState& device) {
  detail::write_comments(out, comments);
  out << "payload_hex,rss_dbm,timestamp_ms\n";
  for (const ContactLogEntry& e : device.contact_log) {
    out << to_hex(e.observed_payload) << ',' << format_double(e.rss_dbm) << ','
        << e.timestamp_ms << '\n';
  }
}

// Newline-delimited bundle records, no header: the exact bytes a health
// authority would redistribute.
inline void write_bundle(std::ostream& out, const InfectedBundle& bundle) {
  for (const Signature& s : bundle.signatures) {
    out << to_hex(s.payload) << ',' << s.generated_at_ms << ','
        << s.valid_for_ms << '\n';
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw file_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw file_error("failed writing '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw file_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace ptsim
