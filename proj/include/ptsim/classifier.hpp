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
// Common classifier interface. Models are trained on rows of selected
// feature columns so the same implementations serve full and ablated
// feature sets.

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptsim/errors.hpp"
#include "ptsim/features.hpp"

namespace ptsim {

enum class ClassifierKind { DecisionTree, Lda, NaiveBayes, Knn };

inline const char* classifier_kind_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::DecisionTree: return "dt";
    case ClassifierKind::Lda: return "lda";
    case ClassifierKind::NaiveBayes: return "nb";
    case ClassifierKind::Knn: return "knn";
  }
  return "?";
}

inline ClassifierKind classifier_kind_from_name(const std::string& name) {
  if (name == "dt") return ClassifierKind::DecisionTree;
  if (name == "lda") return ClassifierKind::Lda;
  if (name == "nb") return ClassifierKind::NaiveBayes;
  if (name == "knn") return ClassifierKind::Knn;
  throw std::invalid_argument("unknown classifier '" + name +
                              "' (expected dt, lda, nb, or knn)");
}

struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<int> y;  // +1 or -1 per row
  // Optional column names for diagnostics; empty or one per column.
  std::vector<std::string> names;

  size_t size() const { return x.size(); }
  size_t dim() const { return x.empty() ? 0 : x.front().size(); }

  std::string column_name(size_t c) const {
    if (c < names.size()) return names[c];
    return "column " + std::to_string(c);
  }
};

// Projects labeled feature vectors onto the given feature columns.
inline Dataset make_dataset(const std::vector<FeatureVector>& features,
                            const std::vector<size_t>& columns) {
  for (size_t c : columns) {
    if (c >= kFeatureCount) {
      throw std::invalid_argument("feature column index out of range");
    }
  }
  if (columns.empty()) {
    throw std::invalid_argument("need at least one feature column");
  }
  Dataset d;
  for (size_t c : columns) d.names.emplace_back(kFeatureNames[c]);
  d.x.reserve(features.size());
  d.y.reserve(features.size());
  for (const FeatureVector& f : features) {
    auto all = f.values();
    std::vector<double> row;
    row.reserve(columns.size());
    for (size_t c : columns) row.push_back(all[c]);
    d.x.push_back(std::move(row));
    d.y.push_back(f.label);
  }
  return d;
}

inline std::vector<size_t> all_feature_columns() {
  std::vector<size_t> cols(kFeatureCount);
  for (size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  return cols;
}

struct ClassCounts {
  size_t pos = 0;
  size_t neg = 0;
};

// Structural checks shared by all trainers. Class-balance requirements
// differ per model, so callers inspect the returned counts themselves.
inline ClassCounts validate_training_data(const Dataset& data) {
  if (data.size() == 0) {
    throw degenerate_data_error("training set is empty");
  }
  size_t d = data.x.front().size();
  if (d == 0) throw std::invalid_argument("rows must have at least one column");
  if (data.y.size() != data.x.size()) {
    throw std::invalid_argument("row/label count mismatch");
  }
  ClassCounts counts;
  for (size_t i = 0; i < data.size(); ++i) {
    if (data.x[i].size() != d) {
      throw std::invalid_argument("rows have inconsistent dimensions");
    }
    if (data.y[i] == 1) {
      ++counts.pos;
    } else if (data.y[i] == -1) {
      ++counts.neg;
    } else {
      throw std::invalid_argument("labels must be +1 or -1");
    }
  }
  return counts;
}

class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual ClassifierKind kind() const = 0;
  virtual void train(const Dataset& data) = 0;
  // +1 or -1; exact ties between the classes resolve to -1.
  virtual int predict_one(const std::vector<double>& row) const = 0;
  // Confidence for the +1 class in [0, 1]; thresholding at higher values
  // trades recall for precision.
  virtual double score_one(const std::vector<double>& row) const = 0;
  virtual nlohmann::json to_json() const = 0;
  virtual void from_json(const nlohmann::json& j) = 0;

  bool trained() const { return trained_; }

  std::vector<int> predict(const Dataset& data) const {
    std::vector<int> out;
    out.reserve(data.size());
    for (const auto& row : data.x) out.push_back(predict_one(row));
    return out;
  }

  std::vector<double> score(const Dataset& data) const {
    std::vector<double> out;
    out.reserve(data.size());
    for (const auto& row : data.x) out.push_back(score_one(row));
    return out;
  }

 protected:
  void require_trained() const {
    if (!trained_) throw std::logic_error("classifier is not trained");
  }
  void check_row(const std::vector<double>& row) const {
    require_trained();
    if (row.size() != dim_) {
      throw std::invalid_argument("row dimension does not match training");
    }
  }

  bool trained_ = false;
  size_t dim_ = 0;
};

}  // namespace ptsim
