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
// Binary-classification metrics, repeated stratified evaluation, and
// precision/recall curves. Labels are +1 (close contact) and -1.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ptsim/errors.hpp"
#include "ptsim/features.hpp"
#include "ptsim/rng.hpp"
#include "ptsim/util.hpp"

namespace ptsim {

struct ConfusionCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t tn = 0;

  int64_t total() const { return tp + fp + fn + tn; }
};

inline ConfusionCounts confusion(const std::vector<int>& truth,
                                 const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("truth/prediction size mismatch");
  }
  ConfusionCounts c;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != 1 && truth[i] != -1) {
      throw std::invalid_argument("labels must be +1 or -1");
    }
    if (predicted[i] != 1 && predicted[i] != -1) {
      throw std::invalid_argument("predictions must be +1 or -1");
    }
    if (truth[i] == 1) {
      (predicted[i] == 1 ? c.tp : c.fn)++;
    } else {
      (predicted[i] == 1 ? c.fp : c.tn)++;
    }
  }
  return c;
}

struct BinaryMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

// Zero denominators yield 0 rather than NaN so that empty prediction or
// truth sets compare predictably.
inline BinaryMetrics metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("empty confusion counts");
  BinaryMetrics m;
  m.precision =
      (c.tp + c.fp) == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fp);
  m.recall = (c.tp + c.fn) == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  m.accuracy = double(c.tp + c.tn) / double(c.total());
  return m;
}

struct MetricSummary {
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct MetricsReport {
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
  MetricSummary accuracy;
  size_t reps = 0;
};

struct EvalPolicy {
  size_t reps = 100;
  double train_fraction = 0.8;
  uint64_t seed = 1;

  void validate() const {
    if (reps < 2) {
      throw std::invalid_argument(
          "reps must be >= 2 to form a confidence interval");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw std::invalid_argument("train_fraction must lie in (0, 1)");
    }
  }
};

// Shuffles each class separately and moves round(fraction * n_class)
// samples into the test set, clamped so both splits keep at least one
// sample of every class present in the input. Classes with fewer than two
// samples cannot be split.
inline std::pair<std::vector<FeatureVector>, std::vector<FeatureVector>>
stratified_split(const std::vector<FeatureVector>& data, double test_fraction,
                 Rng& rng) {
  std::vector<size_t> pos, neg;
  for (size_t i = 0; i < data.size(); ++i) {
    (data[i].label == 1 ? pos : neg).push_back(i);
  }
  if (pos.size() < 2 || neg.size() < 2) {
    throw degenerate_data_error(
        "need at least two samples of each class to split");
  }
  std::vector<FeatureVector> train, test;
  auto take = [&](std::vector<size_t>& idx) {
    std::shuffle(idx.begin(), idx.end(), rng);
    auto want = static_cast<size_t>(
        std::llround(test_fraction * static_cast<double>(idx.size())));
    size_t n_test = std::clamp<size_t>(want, 1, idx.size() - 1);
    for (size_t k = 0; k < idx.size(); ++k) {
      (k < n_test ? test : train).push_back(data[idx[k]]);
    }
  };
  take(pos);
  take(neg);
  return {std::move(train), std::move(test)};
}

namespace detail {

inline MetricSummary summarize(std::vector<double> values) {
  MetricSummary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.ci_lo = quantile(values, 0.025);
  s.ci_hi = quantile(values, 0.975);
  // Percentiles of a near-constant sample can land on the far side of the
  // mean by interpolation; pin the interval so it always brackets it.
  s.ci_lo = std::min(s.ci_lo, s.mean);
  s.ci_hi = std::max(s.ci_hi, s.mean);
  return s;
}

}  // namespace detail

// Repeated stratified hold-out evaluation. fit_predict is called once per
// repetition with (train, test) and returns one prediction per test row.
// Each repetition draws its own RNG stream from (seed, rep), so reports
// are reproducible and independent of evaluation order.
template <typename FitPredictFn>
MetricsReport evaluate_repeated(const std::vector<FeatureVector>& data,
                                FitPredictFn&& fit_predict,
                                const EvalPolicy& policy) {
  policy.validate();
  std::vector<double> ps, rs, f1s, as;
  ps.reserve(policy.reps);
  rs.reserve(policy.reps);
  f1s.reserve(policy.reps);
  as.reserve(policy.reps);
  for (size_t rep = 0; rep < policy.reps; ++rep) {
    Rng rng = make_stream(policy.seed, rep);
    auto [train, test] =
        stratified_split(data, 1.0 - policy.train_fraction, rng);
    std::vector<int> truth;
    truth.reserve(test.size());
    for (const FeatureVector& f : test) truth.push_back(f.label);
    std::vector<int> predicted = fit_predict(train, test);
    BinaryMetrics m = metrics(confusion(truth, predicted));
    ps.push_back(m.precision);
    rs.push_back(m.recall);
    f1s.push_back(m.f1);
    as.push_back(m.accuracy);
  }
  MetricsReport report;
  report.precision = detail::summarize(std::move(ps));
  report.recall = detail::summarize(std::move(rs));
  report.f1 = detail::summarize(std::move(f1s));
  report.accuracy = detail::summarize(std::move(as));
  report.reps = policy.reps;
  return report;
}

struct PrCurvePoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// One point per distinct score, thresholds descending, predicting +1 for
// score >= threshold. Points with zero recall are omitted so the curve
// starts at its first true positive.
inline std::vector<PrCurvePoint> precision_recall_curve(
    const std::vector<int>& truth, const std::vector<double>& scores) {
  if (truth.size() != scores.size() || truth.empty()) {
    throw std::invalid_argument("truth/score size mismatch");
  }
  int64_t total_pos = 0;
  for (int y : truth) {
    if (y != 1 && y != -1) {
      throw std::invalid_argument("labels must be +1 or -1");
    }
    if (y == 1) ++total_pos;
  }
  if (total_pos == 0 || total_pos == static_cast<int64_t>(truth.size())) {
    throw degenerate_data_error(
        "precision/recall curve needs both classes present");
  }
  std::vector<size_t> order(truth.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<PrCurvePoint> curve;
  int64_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    double theta = scores[order[i]];
    // Consume the whole tie group so each threshold appears once.
    while (i < order.size() && scores[order[i]] == theta) {
      (truth[order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    if (tp == 0) continue;
    PrCurvePoint p;
    p.threshold = theta;
    p.precision = double(tp) / double(tp + fp);
    p.recall = double(tp) / double(total_pos);
    curve.push_back(p);
  }
  return curve;
}

}  // namespace ptsim
