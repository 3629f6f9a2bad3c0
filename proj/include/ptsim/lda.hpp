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
// Linear discriminant analysis: one shared covariance for both classes,
// class means and priors estimated from data, linear decision boundary.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ptsim/classifier.hpp"

namespace ptsim {

class LinearDiscriminant final : public Classifier {
 public:
  ClassifierKind kind() const override { return ClassifierKind::Lda; }

  void train(const Dataset& data) override {
    ClassCounts counts = validate_training_data(data);
    if (counts.pos < 2 || counts.neg < 2) {
      throw degenerate_data_error(
          "linear discriminant needs at least two rows per class");
    }
    const size_t d = data.dim();
    const size_t n = data.size();

    mean_pos_.assign(d, 0.0);
    mean_neg_.assign(d, 0.0);
    for (size_t i = 0; i < n; ++i) {
      auto& mean = data.y[i] == 1 ? mean_pos_ : mean_neg_;
      for (size_t f = 0; f < d; ++f) mean[f] += data.x[i][f];
    }
    for (size_t f = 0; f < d; ++f) {
      mean_pos_[f] /= static_cast<double>(counts.pos);
      mean_neg_[f] /= static_cast<double>(counts.neg);
    }

    // Pooled covariance with the two class means removed; n-2 degrees of
    // freedom. A small ridge keeps nearly collinear features invertible.
    cov_.assign(d, std::vector<double>(d, 0.0));
    for (size_t i = 0; i < n; ++i) {
      const auto& mean = data.y[i] == 1 ? mean_pos_ : mean_neg_;
      for (size_t a = 0; a < d; ++a) {
        double da = data.x[i][a] - mean[a];
        for (size_t b = a; b < d; ++b) {
          cov_[a][b] += da * (data.x[i][b] - mean[b]);
        }
      }
    }
    double trace = 0.0;
    for (size_t a = 0; a < d; ++a) {
      for (size_t b = a; b < d; ++b) {
        cov_[a][b] /= static_cast<double>(n - 2);
        cov_[b][a] = cov_[a][b];
      }
      trace += cov_[a][a];
    }
    const double ridge = 1e-6 * trace / static_cast<double>(d);
    for (size_t a = 0; a < d; ++a) cov_[a][a] += ridge;

    log_prior_pos_ = std::log(static_cast<double>(counts.pos) /
                              static_cast<double>(n));
    log_prior_neg_ = std::log(static_cast<double>(counts.neg) /
                              static_cast<double>(n));
    dim_ = d;
    finalize(data);
    trained_ = true;
  }

  int predict_one(const std::vector<double>& row) const override {
    return linear_score(row) > 0.0 ? 1 : -1;
  }

  double score_one(const std::vector<double>& row) const override {
    return stable_logistic(linear_score(row));
  }

  // Class-posterior pair (positive, negative); sums to 1 by construction.
  std::pair<double, double> posteriors(const std::vector<double>& row) const {
    double s = linear_score(row);
    double p = stable_logistic(s);
    return {p, stable_logistic(-s)};
  }

  const std::vector<double>& mean_positive() const { return mean_pos_; }
  const std::vector<double>& mean_negative() const { return mean_neg_; }
  const std::vector<std::vector<double>>& pooled_covariance() const {
    return cov_;
  }

  nlohmann::json to_json() const override {
    require_trained();
    return {{"mean_pos", mean_pos_},
            {"mean_neg", mean_neg_},
            {"covariance", cov_},
            {"log_prior_pos", log_prior_pos_},
            {"log_prior_neg", log_prior_neg_},
            {"dim", dim_}};
  }

  void from_json(const nlohmann::json& j) override {
    mean_pos_ = j.at("mean_pos").get<std::vector<double>>();
    mean_neg_ = j.at("mean_neg").get<std::vector<double>>();
    cov_ = j.at("covariance").get<std::vector<std::vector<double>>>();
    log_prior_pos_ = j.at("log_prior_pos").get<double>();
    log_prior_neg_ = j.at("log_prior_neg").get<double>();
    dim_ = j.at("dim").get<size_t>();
    if (mean_pos_.size() != dim_ || mean_neg_.size() != dim_ ||
        cov_.size() != dim_) {
      throw format_error("discriminant model dimensions are inconsistent");
    }
    Dataset unnamed;
    finalize(unnamed);
    trained_ = true;
  }

 private:
  static double stable_logistic(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    double e = std::exp(s);
    return e / (1.0 + e);
  }

  double linear_score(const std::vector<double>& row) const {
    check_row(row);
    double s = bias_;
    for (size_t f = 0; f < dim_; ++f) s += weights_[f] * row[f];
    return s;
  }

  // Cholesky factorization of the (ridged) covariance; a non-positive
  // pivot means some feature carries no variance at all.
  void finalize(const Dataset& data) {
    const size_t d = dim_;
    std::vector<std::vector<double>> chol(d, std::vector<double>(d, 0.0));
    for (size_t a = 0; a < d; ++a) {
      for (size_t b = 0; b <= a; ++b) {
        double sum = cov_[a][b];
        for (size_t k = 0; k < b; ++k) sum -= chol[a][k] * chol[b][k];
        if (a == b) {
          if (sum <= 0.0) {
            throw degenerate_data_error(
                "pooled covariance is singular; " + data.column_name(a) +
                " carries no variance");
          }
          chol[a][a] = std::sqrt(sum);
        } else {
          chol[a][b] = sum / chol[b][b];
        }
      }
    }
    auto solve = [&](const std::vector<double>& v) {
      std::vector<double> y(d, 0.0), z(d, 0.0);
      for (size_t a = 0; a < d; ++a) {
        double sum = v[a];
        for (size_t k = 0; k < a; ++k) sum -= chol[a][k] * y[k];
        y[a] = sum / chol[a][a];
      }
      for (size_t a = d; a-- > 0;) {
        double sum = y[a];
        for (size_t k = a + 1; k < d; ++k) sum -= chol[k][a] * z[k];
        z[a] = sum / chol[a][a];
      }
      return z;
    };

    std::vector<double> diff(d);
    for (size_t f = 0; f < d; ++f) diff[f] = mean_pos_[f] - mean_neg_[f];
    weights_ = solve(diff);

    std::vector<double> sp = solve(mean_pos_);
    std::vector<double> sn = solve(mean_neg_);
    double qp = 0.0, qn = 0.0;
    for (size_t f = 0; f < d; ++f) {
      qp += mean_pos_[f] * sp[f];
      qn += mean_neg_[f] * sn[f];
    }
    bias_ = -0.5 * (qp - qn) + (log_prior_pos_ - log_prior_neg_);
  }

  std::vector<double> mean_pos_;
  std::vector<double> mean_neg_;
  std::vector<std::vector<double>> cov_;
  double log_prior_pos_ = 0.0;
  double log_prior_neg_ = 0.0;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

}  // namespace ptsim
