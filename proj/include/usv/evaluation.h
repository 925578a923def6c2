// include/usv/evaluation.h

// Copyright 2026  The usvctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef USV_EVALUATION_H_
#define USV_EVALUATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace usv {

struct Prediction {
  std::string id;
  int truth = 0;
  int predicted = 0;
  int fold = 0;
};

using PredictionSet = std::vector<Prediction>;

inline constexpr int kBootstrapReplicates = 1000;

// Mean recall over the classes that occur in `truth`. Throws
// EmptyPredictions on empty input.
double uar(std::span<const int> truth, std::span<const int> predicted);
double uar(const PredictionSet& preds);

// Per-class recall; classes absent from the truth get 0.
std::vector<double> per_class_recall(const PredictionSet& preds, int num_classes);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};

// Percentile bootstrap: each replicate resamples n predictions with
// replacement (stream derived from (seed, replicate)) and scores UAR over the
// classes present in it. Returns the 2.5th/97.5th percentiles with linear
// interpolation between order statistics.
ConfidenceInterval bootstrap_ci(const PredictionSet& preds,
                                int replicates = kBootstrapReplicates,
                                std::uint64_t seed = 0);

// Row-normalised K x K rates; rows of absent classes are all zero.
std::vector<std::vector<double>> confusion(const PredictionSet& preds,
                                           int num_classes);

struct EvaluationReport {
  double uar = 0.0;
  ConfidenceInterval ci;
  std::vector<std::vector<double>> confusion;
  std::vector<double> per_class_recall;
  std::size_t n = 0;
};

EvaluationReport evaluate(const PredictionSet& preds, int num_classes,
                          int replicates, std::uint64_t seed);

// Linear-interpolated percentile (q in [0, 1]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

}  // namespace usv

#endif  // USV_EVALUATION_H_
