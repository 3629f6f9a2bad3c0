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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ptsim/errors.hpp"
#include "ptsim/metrics.hpp"
#include "ptsim/rng.hpp"
#include "ptsim/util.hpp"

using Catch::Matchers::WithinAbs;
using namespace ptsim;

namespace {

FeatureVector row(double mean, int label) {
  FeatureVector f;
  f.n_samples = 10.0;
  f.mean_rss = mean;
  f.max_rss = mean + 2.0;
  f.min_rss = mean - 2.0;
  f.rss_range = 4.0;
  f.label = label;
  return f;
}

// Linearly separable toy set: positives cluster high, negatives low.
std::vector<FeatureVector> separable(size_t per_class) {
  std::vector<FeatureVector> data;
  for (size_t i = 0; i < per_class; ++i) {
    data.push_back(row(-60.0 - 0.1 * double(i), 1));
    data.push_back(row(-90.0 + 0.1 * double(i), -1));
  }
  return data;
}

// Classifies by the sign of mean_rss relative to -75 dBm.
std::vector<int> threshold_rule(const std::vector<FeatureVector>&,
                                const std::vector<FeatureVector>& test) {
  std::vector<int> out;
  for (const FeatureVector& f : test) out.push_back(f.mean_rss > -75.0 ? 1 : -1);
  return out;
}

}  // namespace

TEST_CASE("hex encoding round-trips and rejects malformed text") {
  std::vector<uint8_t> bytes = {0xde, 0xad, 0xbe, 0xef, 0x00, 0x7f};
  std::string hex = to_hex(bytes.data(), bytes.size());
  REQUIRE(hex == "deadbeef007f");
  REQUIRE(from_hex(hex) == bytes);
  REQUIRE(from_hex("DEADBEEF007F") == bytes);
  REQUIRE_THROWS_AS(from_hex("abc"), format_error);
  REQUIRE_THROWS_AS(from_hex("zz"), format_error);
  REQUIRE(from_hex("").empty());
}

TEST_CASE("the 64-bit FNV-1a digest matches published vectors") {
  REQUIRE(fnv1a64("") == 0xcbf29ce484222325ULL);
  REQUIRE(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  REQUIRE(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("median handles odd and even counts") {
  REQUIRE(median({3.0, 1.0, 2.0}) == 2.0);
  REQUIRE_THAT(median({4.0, 1.0, 3.0, 2.0}), WithinAbs(2.5, 1e-15));
  REQUIRE(median({7.0}) == 7.0);
}

TEST_CASE("quantiles interpolate linearly between order statistics") {
  std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  REQUIRE(quantile(v, 0.0) == 1.0);
  REQUIRE(quantile(v, 1.0) == 4.0);
  REQUIRE_THAT(quantile(v, 0.5), WithinAbs(2.5, 1e-15));
  REQUIRE_THAT(quantile(v, 0.25), WithinAbs(1.75, 1e-15));
}

TEST_CASE("a hand-checked confusion table yields the textbook metrics") {
  BinaryMetrics m = metrics(ConfusionCounts{9, 1, 3, 7});
  REQUIRE_THAT(m.precision, WithinAbs(0.9, 1e-15));
  REQUIRE_THAT(m.recall, WithinAbs(0.75, 1e-15));
  REQUIRE_THAT(m.f1, WithinAbs(2.0 * 0.9 * 0.75 / (0.9 + 0.75), 1e-15));
  REQUIRE_THAT(m.accuracy, WithinAbs(0.8, 1e-15));
}

TEST_CASE("confusion counting matches a independent tally on random pairs") {
  Rng rng = make_stream(41, 0);
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 1 + rng() % 50;
    std::vector<int> truth, pred;
    for (size_t i = 0; i < n; ++i) {
      truth.push_back(rng() % 2 ? 1 : -1);
      pred.push_back(rng() % 2 ? 1 : -1);
    }
    ConfusionCounts c = confusion(truth, pred);
    int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (size_t i = 0; i < n; ++i) {
      tp += (truth[i] == 1 && pred[i] == 1);
      fp += (truth[i] == -1 && pred[i] == 1);
      fn += (truth[i] == 1 && pred[i] == -1);
      tn += (truth[i] == -1 && pred[i] == -1);
    }
    REQUIRE(c.tp == tp);
    REQUIRE(c.fp == fp);
    REQUIRE(c.fn == fn);
    REQUIRE(c.tn == tn);
    REQUIRE(c.total() == static_cast<int64_t>(n));
    BinaryMetrics m = metrics(c);
    if (tp + fp > 0) {
      REQUIRE(m.precision == double(tp) / double(tp + fp));
    } else {
      REQUIRE(m.precision == 0.0);
    }
    if (tp + fn > 0) {
      REQUIRE(m.recall == double(tp) / double(tp + fn));
    } else {
      REQUIRE(m.recall == 0.0);
    }
    REQUIRE(m.accuracy == double(tp + tn) / double(n));
  }
}

TEST_CASE("zero denominators yield zero instead of NaN") {
  // Nothing predicted positive: precision 0. Nothing actually positive:
  // recall 0. Both: f1 collapses to 0.
  BinaryMetrics never_pos = metrics(ConfusionCounts{0, 0, 5, 5});
  REQUIRE(never_pos.precision == 0.0);
  REQUIRE(never_pos.f1 == 0.0);
  BinaryMetrics no_pos_truth = metrics(ConfusionCounts{0, 4, 0, 6});
  REQUIRE(no_pos_truth.recall == 0.0);
  REQUIRE(no_pos_truth.f1 == 0.0);
  REQUIRE_THROWS_AS(metrics(ConfusionCounts{0, 0, 0, 0}),
                    std::invalid_argument);
}

TEST_CASE("confusion validates label values and lengths") {
  REQUIRE_THROWS_AS(confusion({1, -1}, {1}), std::invalid_argument);
  REQUIRE_THROWS_AS(confusion({1, 0}, {1, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(confusion({1, 1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("stratified splits keep both classes on both sides") {
  Rng seed_rng = make_stream(42, 0);
  auto data = separable(25);
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(seed_rng());
    auto [train, test] = stratified_split(data, 0.2, rng);
    REQUIRE(train.size() + test.size() == data.size());
    auto count = [](const std::vector<FeatureVector>& part, int label) {
      size_t n = 0;
      for (const FeatureVector& f : part) n += (f.label == label);
      return n;
    };
    REQUIRE(count(train, 1) >= 1);
    REQUIRE(count(train, -1) >= 1);
    REQUIRE(count(test, 1) >= 1);
    REQUIRE(count(test, -1) >= 1);
    // 20% of 25 per class.
    REQUIRE(count(test, 1) == 5);
    REQUIRE(count(test, -1) == 5);
  }
}

TEST_CASE("splitting requires two samples of each class") {
  Rng rng = make_stream(43, 0);
  std::vector<FeatureVector> data = {row(-60, 1), row(-61, 1), row(-90, -1)};
  REQUIRE_THROWS_AS(stratified_split(data, 0.2, rng), degenerate_data_error);
  std::vector<FeatureVector> one_sided = {row(-60, 1), row(-61, 1)};
  REQUIRE_THROWS_AS(stratified_split(one_sided, 0.2, rng),
                    degenerate_data_error);
}

TEST_CASE("extreme test fractions are clamped to leave both sides populated") {
  auto data = separable(10);
  Rng rng = make_stream(44, 0);
  auto [train_lo, test_lo] = stratified_split(data, 0.0001, rng);
  REQUIRE(test_lo.size() == 2);  // one per class
  auto [train_hi, test_hi] = stratified_split(data, 0.9999, rng);
  REQUIRE(train_hi.size() == 2);
}

TEST_CASE("a perfect rule on separable data scores one across the board") {
  EvalPolicy policy;
  policy.reps = 20;
  policy.seed = 7;
  MetricsReport r = evaluate_repeated(separable(30), threshold_rule, policy);
  REQUIRE(r.reps == 20);
  REQUIRE(r.accuracy.mean == 1.0);
  REQUIRE(r.accuracy.ci_lo == 1.0);
  REQUIRE(r.accuracy.ci_hi == 1.0);
  REQUIRE(r.f1.mean == 1.0);
  REQUIRE(r.precision.mean == 1.0);
  REQUIRE(r.recall.mean == 1.0);
}

TEST_CASE("repeated evaluation is reproducible and seed-sensitive") {
  auto data = separable(20);
  // A deliberately noisy rule: it misclassifies a fixed third of the rows,
  // identified by value, so accuracy depends on which rows each split drew.
  auto noisy_rule = [](const std::vector<FeatureVector>&,
                       const std::vector<FeatureVector>& test) {
    std::vector<int> out;
    for (const FeatureVector& f : test) {
      int truthlike = f.mean_rss > -75.0 ? 1 : -1;
      auto key = static_cast<int64_t>(std::llround(f.mean_rss * 10.0));
      out.push_back(key % 3 == 0 ? -truthlike : truthlike);
    }
    return out;
  };
  EvalPolicy policy;
  policy.reps = 15;
  policy.seed = 99;
  MetricsReport a = evaluate_repeated(data, noisy_rule, policy);
  MetricsReport b = evaluate_repeated(data, noisy_rule, policy);
  REQUIRE(a.accuracy.mean == b.accuracy.mean);
  REQUIRE(a.f1.ci_lo == b.f1.ci_lo);
  REQUIRE(a.recall.ci_hi == b.recall.ci_hi);
  policy.seed = 100;
  MetricsReport c = evaluate_repeated(data, noisy_rule, policy);
  REQUIRE(a.accuracy.mean != c.accuracy.mean);
}

TEST_CASE("confidence intervals always bracket the mean") {
  Rng rng = make_stream(45, 0);
  auto coin_rule = [&](const std::vector<FeatureVector>&,
                       const std::vector<FeatureVector>& test) {
    std::vector<int> out;
    for (size_t i = 0; i < test.size(); ++i) {
      out.push_back(rng() % 2 ? 1 : -1);
    }
    return out;
  };
  EvalPolicy policy;
  policy.reps = 40;
  policy.seed = 5;
  MetricsReport r = evaluate_repeated(separable(15), coin_rule, policy);
  for (const MetricSummary* s :
       {&r.precision, &r.recall, &r.f1, &r.accuracy}) {
    REQUIRE(s->ci_lo <= s->mean);
    REQUIRE(s->mean <= s->ci_hi);
    REQUIRE(s->ci_lo >= 0.0);
    REQUIRE(s->ci_hi <= 1.0);
  }
}

TEST_CASE("fewer than two repetitions is rejected") {
  EvalPolicy policy;
  policy.reps = 1;
  REQUIRE_THROWS_AS(evaluate_repeated(separable(10), threshold_rule, policy),
                    std::invalid_argument);
  policy.reps = 10;
  policy.train_fraction = 1.0;
  REQUIRE_THROWS_AS(evaluate_repeated(separable(10), threshold_rule, policy),
                    std::invalid_argument);
}

TEST_CASE("a hand-worked score list produces the expected curve") {
  std::vector<int> truth = {1, -1, 1, -1};
  std::vector<double> scores = {0.9, 0.8, 0.7, 0.1};
  auto curve = precision_recall_curve(truth, scores);
  REQUIRE(curve.size() == 4);
  REQUIRE(curve[0].threshold == 0.9);
  REQUIRE(curve[0].precision == 1.0);
  REQUIRE(curve[0].recall == 0.5);
  REQUIRE_THAT(curve[1].precision, WithinAbs(0.5, 1e-15));
  REQUIRE(curve[1].recall == 0.5);
  REQUIRE_THAT(curve[2].precision, WithinAbs(2.0 / 3.0, 1e-15));
  REQUIRE(curve[2].recall == 1.0);
  REQUIRE_THAT(curve[3].precision, WithinAbs(0.5, 1e-15));
  REQUIRE(curve[3].recall == 1.0);
  // Thresholds strictly descending.
  for (size_t i = 1; i < curve.size(); ++i) {
    REQUIRE(curve[i].threshold < curve[i - 1].threshold);
  }
}

TEST_CASE("leading zero-recall thresholds are omitted from the curve") {
  std::vector<int> truth = {-1, 1};
  std::vector<double> scores = {0.9, 0.1};
  auto curve = precision_recall_curve(truth, scores);
  REQUIRE(curve.size() == 1);
  REQUIRE(curve[0].threshold == 0.1);
  REQUIRE_THAT(curve[0].precision, WithinAbs(0.5, 1e-15));
  REQUIRE(curve[0].recall == 1.0);
}

TEST_CASE("tied scores collapse into a single curve point") {
  std::vector<int> truth = {1, -1, 1};
  std::vector<double> scores = {0.5, 0.5, 0.5};
  auto curve = precision_recall_curve(truth, scores);
  REQUIRE(curve.size() == 1);
  REQUIRE_THAT(curve[0].precision, WithinAbs(2.0 / 3.0, 1e-15));
  REQUIRE(curve[0].recall == 1.0);
}

TEST_CASE("a perfect scorer reaches full recall at full precision") {
  std::vector<int> truth;
  std::vector<double> scores;
  Rng rng = make_stream(46, 0);
  for (int i = 0; i < 200; ++i) {
    int y = rng() % 2 ? 1 : -1;
    truth.push_back(y);
    scores.push_back(y == 1 ? 0.5 + 0.5 * uniform_unit(rng)
                            : 0.5 * uniform_unit(rng) - 0.001);
  }
  auto curve = precision_recall_curve(truth, scores);
  REQUIRE(!curve.empty());
  bool saw_perfect = false;
  for (const PrCurvePoint& p : curve) {
    if (p.recall == 1.0 && p.precision == 1.0) saw_perfect = true;
  }
  REQUIRE(saw_perfect);
  // Recall never decreases as the threshold drops.
  for (size_t i = 1; i < curve.size(); ++i) {
    REQUIRE(curve[i].recall >= curve[i - 1].recall);
  }
}

TEST_CASE("a random scorer converges to base-rate precision") {
  Rng rng = make_stream(47, 0);
  std::vector<int> truth;
  std::vector<double> scores;
  for (int i = 0; i < 10'000; ++i) {
    truth.push_back(rng() % 2 ? 1 : -1);
    scores.push_back(uniform_unit(rng));
  }
  auto curve = precision_recall_curve(truth, scores);
  REQUIRE(curve.back().recall == 1.0);
  REQUIRE_THAT(curve.back().precision, WithinAbs(0.5, 0.05));
}

TEST_CASE("single-class truth cannot form a curve") {
  REQUIRE_THROWS_AS(precision_recall_curve({1, 1, 1}, {0.1, 0.2, 0.3}),
                    degenerate_data_error);
  REQUIRE_THROWS_AS(precision_recall_curve({-1, -1}, {0.1, 0.2}),
                    degenerate_data_error);
  REQUIRE_THROWS_AS(precision_recall_curve({}, {}), std::invalid_argument);
  REQUIRE_THROWS_AS(precision_recall_curve({1, -1}, {0.1}),
                    std::invalid_argument);
}
