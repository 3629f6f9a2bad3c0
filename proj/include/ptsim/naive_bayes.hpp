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
// Gaussian naive Bayes: per-class, per-feature independent normals with
// maximum-likelihood moments, evaluated in the log domain.

#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "ptsim/classifier.hpp"

namespace ptsim {

class GaussianNaiveBayes final : public Classifier {
 public:
  ClassifierKind kind() const override { return ClassifierKind::NaiveBayes; }

  void train(const Dataset& data) override {
    ClassCounts counts = validate_training_data(data);
    if (counts.pos == 0 || counts.neg == 0) {
      throw degenerate_data_error(
          "naive Bayes needs at least one row per class");
    }
    const size_t d = data.dim();
    const size_t n = data.size();

    auto moments = [&](int label, size_t n_class) {
      std::vector<double> mean(d, 0.0), var(d, 0.0);
      for (size_t i = 0; i < n; ++i) {
        if (data.y[i] != label) continue;
        for (size_t f = 0; f < d; ++f) mean[f] += data.x[i][f];
      }
      for (size_t f = 0; f < d; ++f) mean[f] /= static_cast<double>(n_class);
      for (size_t i = 0; i < n; ++i) {
        if (data.y[i] != label) continue;
        for (size_t f = 0; f < d; ++f) {
          double delta = data.x[i][f] - mean[f];
          var[f] += delta * delta;
        }
      }
      for (size_t f = 0; f < d; ++f) var[f] /= static_cast<double>(n_class);
      return std::pair{mean, var};
    };
    auto [mp, vp] = moments(1, counts.pos);
    auto [mn, vn] = moments(-1, counts.neg);

    // Floor class variances against the spread of the whole column so a
    // feature that is constant within one class cannot degenerate the
    // density; the absolute term covers globally constant columns.
    std::vector<double> global_mean(d, 0.0), global_var(d, 0.0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t f = 0; f < d; ++f) global_mean[f] += data.x[i][f];
    }
    for (size_t f = 0; f < d; ++f) global_mean[f] /= static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
      for (size_t f = 0; f < d; ++f) {
        double delta = data.x[i][f] - global_mean[f];
        global_var[f] += delta * delta;
      }
    }
    for (size_t f = 0; f < d; ++f) {
      global_var[f] /= static_cast<double>(n);
      double floor = std::max(1e-9 * global_var[f], 1e-12);
      vp[f] = std::max(vp[f], floor);
      vn[f] = std::max(vn[f], floor);
    }

    mean_pos_ = std::move(mp);
    var_pos_ = std::move(vp);
    mean_neg_ = std::move(mn);
    var_neg_ = std::move(vn);
    log_prior_pos_ =
        std::log(static_cast<double>(counts.pos) / static_cast<double>(n));
    log_prior_neg_ =
        std::log(static_cast<double>(counts.neg) / static_cast<double>(n));
    dim_ = d;
    trained_ = true;
  }

  int predict_one(const std::vector<double>& row) const override {
    check_row(row);
    return log_joint_pos(row) > log_joint_neg(row) ? 1 : -1;
  }

  double score_one(const std::vector<double>& row) const override {
    check_row(row);
    double s = log_joint_pos(row) - log_joint_neg(row);
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    double e = std::exp(s);
    return e / (1.0 + e);
  }

  double log_joint_pos(const std::vector<double>& row) const {
    return log_joint(row, mean_pos_, var_pos_, log_prior_pos_);
  }
  double log_joint_neg(const std::vector<double>& row) const {
    return log_joint(row, mean_neg_, var_neg_, log_prior_neg_);
  }

  nlohmann::json to_json() const override {
    require_trained();
    return {{"mean_pos", mean_pos_}, {"var_pos", var_pos_},
            {"mean_neg", mean_neg_}, {"var_neg", var_neg_},
            {"log_prior_pos", log_prior_pos_},
            {"log_prior_neg", log_prior_neg_},
            {"dim", dim_}};
  }

  void from_json(const nlohmann::json& j) override {
    mean_pos_ = j.at("mean_pos").get<std::vector<double>>();
    var_pos_ = j.at("var_pos").get<std::vector<double>>();
    mean_neg_ = j.at("mean_neg").get<std::vector<double>>();
    var_neg_ = j.at("var_neg").get<std::vector<double>>();
    log_prior_pos_ = j.at("log_prior_pos").get<double>();
    log_prior_neg_ = j.at("log_prior_neg").get<double>();
    dim_ = j.at("dim").get<size_t>();
    if (mean_pos_.size() != dim_ || var_pos_.size() != dim_ ||
        mean_neg_.size() != dim_ || var_neg_.size() != dim_) {
      throw format_error("naive Bayes model dimensions are inconsistent");
    }
    for (double v : var_pos_) {
      if (!(v > 0.0)) throw format_error("variances must be positive");
    }
    for (double v : var_neg_) {
      if (!(v > 0.0)) throw format_error("variances must be positive");
    }
    trained_ = true;
  }

 private:
  static double log_joint(const std::vector<double>& row,
                          const std::vector<double>& mean,
                          const std::vector<double>& var, double log_prior) {
    double s = log_prior;
    for (size_t f = 0; f < row.size(); ++f) {
      double delta = row[f] - mean[f];
      s -= 0.5 * (std::log(2.0 * std::numbers::pi * var[f]) +
                  delta * delta / var[f]);
    }
    return s;
  }

  std::vector<double> mean_pos_, var_pos_;
  std::vector<double> mean_neg_, var_neg_;
  double log_prior_pos_ = 0.0;
  double log_prior_neg_ = 0.0;
};

}  // namespace ptsim
