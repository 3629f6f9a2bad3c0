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

#include <stdexcept>
#include <string>

namespace ptsim {

// File exists but its contents do not match the documented schema.
class format_error : public std::runtime_error {
 public:
  explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

// Input data is structurally valid but unusable for the requested
// computation (single-class dataset, empty training set, ...).
class degenerate_data_error : public std::runtime_error {
 public:
  explicit degenerate_data_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Scenario configuration is missing, unreadable, or inconsistent.
class scenario_error : public std::runtime_error {
 public:
  explicit scenario_error(const std::string& what)
      : std::runtime_error(what) {}
};

// A path could not be opened for reading or writing.
class file_error : public std::runtime_error {
 public:
  explicit file_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ptsim
