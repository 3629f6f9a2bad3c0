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
// Classifier factory and model persistence.

#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "ptsim/classifier.hpp"
#include "ptsim/decision_tree.hpp"
#include "ptsim/knn.hpp"
#include "ptsim/lda.hpp"
#include "ptsim/naive_bayes.hpp"

namespace ptsim {

inline constexpr int kModelFormatVersion = 1;

inline std::unique_ptr<Classifier> make_classifier(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::DecisionTree:
      return std::make_unique<DecisionTree>();
    case ClassifierKind::Lda:
      return std::make_unique<LinearDiscriminant>();
    case ClassifierKind::NaiveBayes:
      return std::make_unique<GaussianNaiveBayes>();
    case ClassifierKind::Knn:
      return std::make_unique<NearestNeighbors>();
  }
  throw std::invalid_argument("unknown classifier kind");
}

inline std::string serialize_model(const Classifier& model) {
  nlohmann::json j = {{"format", "ptsim-model"},
                      {"version", kModelFormatVersion},
                      {"kind", classifier_kind_name(model.kind())},
                      {"params", model.to_json()}};
  return j.dump(2) + "\n";
}

inline std::unique_ptr<Classifier> deserialize_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("model file is not valid JSON: ") +
                       e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "ptsim-model") {
      throw format_error("not a model file (bad format tag)");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw format_error("unsupported model version");
    }
    auto model =
        make_classifier(classifier_kind_from_name(j.at("kind").get<std::string>()));
    model->from_json(j.at("params"));
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("model file is malformed: ") + e.what());
  }
}

inline void save_model(const Classifier& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw file_error("cannot open '" + path + "' for writing");
  out << serialize_model(model);
  if (!out) throw file_error("failed writing '" + path + "'");
}

inline std::unique_ptr<Classifier> load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw file_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace ptsim
