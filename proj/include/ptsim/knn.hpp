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
// k-nearest-neighbor majority vote with Euclidean distance on z-scaled
// features. Feature columns are standardized with training moments so
// counts and dBm values weigh equally.

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "ptsim/classifier.hpp"

namespace ptsim {

struct KnnParams {
  size_t k = 5;

  void validate() const {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
  }
};

class NearestNeighbors final : public Classifier {
 public:
  NearestNeighbors() = default;
  explicit NearestNeighbors(KnnParams params) : params_(params) {
    params_.validate();
  }

  ClassifierKind kind() const override { return ClassifierKind::Knn; }

  void train(const Dataset& data) override {
    params_.validate();
    validate_training_data(data);
    if (params_.k > data.size()) {
      throw std::invalid_argument("k exceeds the number of training rows");
    }
    const size_t d = data.dim();
    const size_t n = data.size();

    mean_.assign(d, 0.0);
    scale_.assign(d, 0.0);
    for (const auto& row : data.x) {
      for (size_t f = 0; f < d; ++f) mean_[f] += row[f];
    }
    for (size_t f = 0; f < d; ++f) mean_[f] /= static_cast<double>(n);
    for (const auto& row : data.x) {
      for (size_t f = 0; f < d; ++f) {
        double delta = row[f] - mean_[f];
        scale_[f] += delta * delta;
      }
    }
    for (size_t f = 0; f < d; ++f) {
      scale_[f] = std::sqrt(scale_[f] / static_cast<double>(n));
      // A constant column carries no distance information; unit scale
      // keeps it inert instead of dividing by zero.
      if (scale_[f] == 0.0) scale_[f] = 1.0;
    }

    points_.assign(n, std::vector<double>(d));
    labels_ = data.y;
    for (size_t i = 0; i < n; ++i) {
      for (size_t f = 0; f < d; ++f) {
        points_[i][f] = (data.x[i][f] - mean_[f]) / scale_[f];
      }
    }
    dim_ = d;
    trained_ = true;
  }

  int predict_one(const std::vector<double>& row) const override {
    size_t votes = positive_votes(row);
    return votes > params_.k - votes ? 1 : -1;
  }

  double score_one(const std::vector<double>& row) const override {
    return static_cast<double>(positive_votes(row)) /
           static_cast<double>(params_.k);
  }

  const KnnParams& params() const { return params_; }

  nlohmann::json to_json() const override {
    require_trained();
    return {{"k", params_.k},       {"mean", mean_},
            {"scale", scale_},      {"points", points_},
            {"labels", labels_},    {"dim", dim_}};
  }

  void from_json(const nlohmann::json& j) override {
    KnnParams p;
    p.k = j.at("k").get<size_t>();
    p.validate();
    mean_ = j.at("mean").get<std::vector<double>>();
    scale_ = j.at("scale").get<std::vector<double>>();
    points_ = j.at("points").get<std::vector<std::vector<double>>>();
    labels_ = j.at("labels").get<std::vector<int>>();
    dim_ = j.at("dim").get<size_t>();
    if (mean_.size() != dim_ || scale_.size() != dim_ ||
        points_.size() != labels_.size() || points_.size() < p.k) {
      throw format_error("neighbor model dimensions are inconsistent");
    }
    params_ = p;
    trained_ = true;
  }

 private:
  // Ties in distance resolve by training-row index, so predictions are
  // independent of sort internals.
  size_t positive_votes(const std::vector<double>& row) const {
    check_row(row);
    std::vector<std::pair<double, size_t>> order(points_.size());
    for (size_t i = 0; i < points_.size(); ++i) {
      double dist2 = 0.0;
      for (size_t f = 0; f < dim_; ++f) {
        double delta = (row[f] - mean_[f]) / scale_[f] - points_[i][f];
        dist2 += delta * delta;
      }
      order[i] = {dist2, i};
    }
    std::partial_sort(order.begin(), order.begin() + params_.k, order.end());
    size_t votes = 0;
    for (size_t i = 0; i < params_.k; ++i) {
      if (labels_[order[i].second] == 1) ++votes;
    }
    return votes;
  }

  KnnParams params_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<std::vector<double>> points_;
  std::vector<int> labels_;
};

}  // namespace ptsim
