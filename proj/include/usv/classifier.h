// include/usv/classifier.h

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

#ifndef USV_CLASSIFIER_H_
#define USV_CLASSIFIER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usv/corpus.h"
#include "usv/pitch_features.h"

namespace usv {

// Cost values searched during model selection.
inline const std::vector<double> kCostGrid = {0.0001, 0.001, 0.005, 0.05,
                                              0.1,    0.5,   1.0};

// Dense row-major design matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  void push_row(std::span<const double> values);
};

// Per-feature mean and population std of the development set.
struct Standardiser {
  std::vector<double> mean;
  std::vector<double> scale;           // std, or 1 where the std was 0
  std::vector<bool> zero_variance;

  std::vector<double> apply(std::span<const double> x) const;
  Matrix apply(const Matrix& x) const;
};

// Zero-variance features get scale 1 and are flagged. Throws
// std::invalid_argument on an empty input.
Standardiser fit_standardiser(const Matrix& features);

struct SolverOptions {
  double tolerance = 1e-4;  // max projected-gradient violation
  int max_epochs = 2000;
};

struct SolverResult {
  std::vector<double> w;  // feature weights
  double bias = 0.0;
  int epochs = 0;
  double final_violation = 0.0;
  bool converged = false;
  // Primal objective of the retained iterate after each epoch.
  std::vector<double> objective_trace;
};

// L1-loss linear SVM with the bias folded in as a constant feature:
//   min 1/2 (|w|^2 + b^2) + sum_n upper[n] * max(0, 1 - y_n (w.x_n + b)).
// Dual coordinate descent with the coordinate order reshuffled every epoch
// under `seed`. The iterate with the lowest primal objective seen at an epoch
// boundary is returned. Throws SingleClassData unless both labels occur
// with a positive bound.
SolverResult solve_dual_cd(const Matrix& x, std::span<const int> y,
                           std::span<const double> upper, std::uint64_t seed,
                           const SolverOptions& options = {});

// Objective minimised by solve_dual_cd, for arbitrary (w, b).
double primal_objective(const Matrix& x, std::span<const int> y,
                        std::span<const double> upper, std::span<const double> w,
                        double bias);

struct BinarySvm {
  int class_i = 0;  // d > 0 (and d == 0) votes class_i
  int class_j = 1;  // d < 0 votes class_j
  double cost = 0.0;
  std::vector<double> w;
  double bias = 0.0;

  double decision(std::span<const double> x) const;
};

// Labels are +1 for class_i and -1 for class_j. Per-sample bound is
// cost * weight_pos / weight_neg respectively.
BinarySvm train_binary(const Matrix& x, std::span<const int> y, double cost,
                       double weight_pos, double weight_neg, std::uint64_t seed,
                       const SolverOptions& options = {});

// weight(k) = N / (K * n_k); classes absent from `labels` get 0.
std::vector<double> inverse_frequency_weights(std::span<const int> labels,
                                              int num_classes);

struct OvoModel {
  int num_classes = 0;
  double cost = 0.0;
  Standardiser standardiser;
  std::vector<BinarySvm> machines;  // pairs (i < j) in lexicographic order

  std::string serialise(std::span<const std::string> comments = {}) const;
  static OvoModel deserialise(std::string_view text);
};

struct Vote {
  int label = 0;
  std::vector<int> votes;      // per class
  std::vector<double> scores;  // per class: sum of |d| over machines voting for it
};

// `x` is already standardised. Majority vote; ties go to the larger score,
// then to the lower class index.
Vote vote(const OvoModel& model, std::span<const double> x);

// Standardises raw features then votes.
int predict_index(const OvoModel& model, std::span<const double> raw);
ContextLabel predict(const OvoModel& model, const FeatureVector& features);

// Trains all K(K-1)/2 machines on already standardised rows. Pairwise jobs
// run in parallel; each is seeded from (seed, i, j). A pair with one side
// absent from the data becomes a constant machine voting for the other side.
std::vector<BinarySvm> train_pairs(const Matrix& x, std::span<const int> labels,
                                   int num_classes, double cost,
                                   std::span<const double> class_weights,
                                   std::uint64_t seed,
                                   const SolverOptions& options = {});

struct SelectionResult {
  OvoModel model;
  std::vector<double> validation_uar;  // per grid entry
  std::size_t chosen = 0;              // index into the grid
};

// Fits the standardiser on the full dev set, trains one model per cost on
// the train rows, scores UAR on the validation rows, keeps the best cost
// (ties to the smaller cost) and retrains on the full dev set. Class weights
// come from the full dev set. With no validation rows every cost scores 0
// and the smallest wins.
SelectionResult nested_select(const Matrix& dev_raw, std::span<const int> labels,
                              const std::vector<bool>& is_validation,
                              std::span<const double> grid, int num_classes,
                              std::uint64_t seed,
                              const SolverOptions& options = {});

}  // namespace usv

#endif  // USV_CLASSIFIER_H_
