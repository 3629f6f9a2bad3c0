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
// Binary CART-style decision tree with axis-aligned splits x[f] <= gamma.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ptsim/classifier.hpp"

namespace ptsim {

enum class SplitCriterion { Gini, Entropy };

inline const char* split_criterion_name(SplitCriterion c) {
  return c == SplitCriterion::Gini ? "gini" : "entropy";
}

inline SplitCriterion split_criterion_from_name(const std::string& name) {
  if (name == "gini") return SplitCriterion::Gini;
  if (name == "entropy") return SplitCriterion::Entropy;
  throw std::invalid_argument("unknown split criterion '" + name + "'");
}

struct DecisionTreeParams {
  SplitCriterion criterion = SplitCriterion::Gini;
  size_t max_depth = 12;
  size_t min_leaf = 5;

  void validate() const {
    if (min_leaf == 0) throw std::invalid_argument("min_leaf must be >= 1");
  }
};

class DecisionTree final : public Classifier {
 public:
  // One node per element; feature < 0 marks a leaf. Splits send rows with
  // x[feature] <= threshold to child_leq, the rest to child_gt.
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int child_leq = -1;
    int child_gt = -1;
    int64_t pos = 0;
    int64_t neg = 0;
  };

  DecisionTree() = default;
  explicit DecisionTree(DecisionTreeParams params) : params_(params) {
    params_.validate();
  }

  ClassifierKind kind() const override { return ClassifierKind::DecisionTree; }

  void train(const Dataset& data) override {
    params_.validate();
    validate_training_data(data);
    nodes_.clear();
    dim_ = data.dim();
    std::vector<size_t> all(data.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    build(data, all, 0);
    trained_ = true;
  }

  int predict_one(const std::vector<double>& row) const override {
    const Node& leaf = nodes_[descend(row)];
    return leaf.pos > leaf.neg ? 1 : -1;
  }

  double score_one(const std::vector<double>& row) const override {
    const Node& leaf = nodes_[descend(row)];
    return static_cast<double>(leaf.pos) /
           static_cast<double>(leaf.pos + leaf.neg);
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const DecisionTreeParams& params() const { return params_; }

  nlohmann::json to_json() const override {
    require_trained();
    nlohmann::json nodes = nlohmann::json::array();
    for (const Node& n : nodes_) {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"child_leq", n.child_leq},
                       {"child_gt", n.child_gt},
                       {"pos", n.pos},
                       {"neg", n.neg}});
    }
    return {{"criterion", split_criterion_name(params_.criterion)},
            {"max_depth", params_.max_depth},
            {"min_leaf", params_.min_leaf},
            {"dim", dim_},
            {"nodes", nodes}};
  }

  void from_json(const nlohmann::json& j) override {
    DecisionTreeParams p;
    p.criterion = split_criterion_from_name(j.at("criterion").get<std::string>());
    p.max_depth = j.at("max_depth").get<size_t>();
    p.min_leaf = j.at("min_leaf").get<size_t>();
    p.validate();
    std::vector<Node> nodes;
    for (const auto& jn : j.at("nodes")) {
      Node n;
      n.feature = jn.at("feature").get<int>();
      n.threshold = jn.at("threshold").get<double>();
      n.child_leq = jn.at("child_leq").get<int>();
      n.child_gt = jn.at("child_gt").get<int>();
      n.pos = jn.at("pos").get<int64_t>();
      n.neg = jn.at("neg").get<int64_t>();
      nodes.push_back(n);
    }
    if (nodes.empty()) throw format_error("decision tree has no nodes");
    params_ = p;
    nodes_ = std::move(nodes);
    dim_ = j.at("dim").get<size_t>();
    trained_ = true;
  }

 private:
  // Splits with gain at or below this are treated as no improvement; keeps
  // float noise from manufacturing spurious splits on constant features.
  static constexpr double kMinGain = 1e-12;

  double impurity(int64_t pos, int64_t neg) const {
    int64_t n = pos + neg;
    if (n == 0) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(n);
    double q = static_cast<double>(neg) / static_cast<double>(n);
    if (params_.criterion == SplitCriterion::Gini) {
      return 1.0 - p * p - q * q;
    }
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (q > 0.0) h -= q * std::log2(q);
    return h;
  }

  size_t descend(const std::vector<double>& row) const {
    check_row(row);
    size_t i = 0;
    while (nodes_[i].feature >= 0) {
      const Node& n = nodes_[i];
      i = static_cast<size_t>(
          row[static_cast<size_t>(n.feature)] <= n.threshold ? n.child_leq
                                                             : n.child_gt);
    }
    return i;
  }

  // Returns the new node's index. Candidate thresholds are midpoints of
  // consecutive distinct feature values; both children of an eligible
  // split must keep at least min_leaf rows. Features are scanned in index
  // order and thresholds in ascending order, so on equal gain the lowest
  // feature index and the smallest threshold win.
  int build(const Dataset& data, const std::vector<size_t>& rows,
            size_t depth) {
    int64_t pos = 0, neg = 0;
    for (size_t r : rows) (data.y[r] == 1 ? pos : neg)++;

    int index = static_cast<int>(nodes_.size());
    Node node;
    node.pos = pos;
    node.neg = neg;
    nodes_.push_back(node);

    if (pos == 0 || neg == 0 || depth >= params_.max_depth ||
        rows.size() < 2 * params_.min_leaf) {
      return index;
    }

    // Argmin of the size-weighted child impurity; scanning features in
    // index order and thresholds ascending makes the tie-break (lowest
    // feature, then smallest threshold) implicit. A node stays a leaf
    // unless the best split strictly improves on its own impurity.
    const double parent_imp = impurity(pos, neg);
    const double n = static_cast<double>(rows.size());
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_weighted = parent_imp - kMinGain;

    std::vector<std::pair<double, int>> column(rows.size());
    for (size_t f = 0; f < data.dim(); ++f) {
      for (size_t i = 0; i < rows.size(); ++i) {
        column[i] = {data.x[rows[i]][f], data.y[rows[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      int64_t lpos = 0, lneg = 0;
      for (size_t i = 0; i + 1 < column.size(); ++i) {
        (column[i].second == 1 ? lpos : lneg)++;
        if (column[i].first == column[i + 1].first) continue;
        int64_t nl = lpos + lneg;
        int64_t nr = static_cast<int64_t>(rows.size()) - nl;
        if (nl < static_cast<int64_t>(params_.min_leaf) ||
            nr < static_cast<int64_t>(params_.min_leaf)) {
          continue;
        }
        double weighted =
            (static_cast<double>(nl) / n) * impurity(lpos, lneg) +
            (static_cast<double>(nr) / n) * impurity(pos - lpos, neg - lneg);
        if (weighted < best_weighted) {
          best_weighted = weighted;
          best_feature = static_cast<int>(f);
          best_threshold = column[i].first +
                           (column[i + 1].first - column[i].first) / 2.0;
        }
      }
    }

    if (best_feature < 0) return index;

    std::vector<size_t> leq, gt;
    for (size_t r : rows) {
      (data.x[r][static_cast<size_t>(best_feature)] <= best_threshold ? leq
                                                                      : gt)
          .push_back(r);
    }
    int left = build(data, leq, depth + 1);
    int right = build(data, gt, depth + 1);
    nodes_[static_cast<size_t>(index)].feature = best_feature;
    nodes_[static_cast<size_t>(index)].threshold = best_threshold;
    nodes_[static_cast<size_t>(index)].child_leq = left;
    nodes_[static_cast<size_t>(index)].child_gt = right;
    return index;
  }

  DecisionTreeParams params_;
  std::vector<Node> nodes_;
};

}  // namespace ptsim
