// src/evaluation.cc

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

#include "usv/evaluation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "usv/error.h"
#include "usv/parallel.h"
#include "usv/random.h"

namespace usv {

namespace {

int class_bound(std::span<const int> labels) {
  int k = 0;
  for (int v : labels) {
    if (v < 0) throw std::invalid_argument("negative class index");
    k = std::max(k, v + 1);
  }
  return k;
}

}  // namespace

double uar(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.empty()) throw EmptyPredictions("UAR of an empty prediction set");
  if (truth.size() != predicted.size())
    throw std::invalid_argument("truth and prediction lengths differ");
  const int k = class_bound(truth);
  std::vector<std::size_t> total(k, 0), correct(k, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++total[truth[i]];
    if (predicted[i] == truth[i]) ++correct[truth[i]];
  }
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    if (total[c] == 0) continue;
    sum += static_cast<double>(correct[c]) / static_cast<double>(total[c]);
    ++present;
  }
  return sum / present;
}

double uar(const PredictionSet& preds) {
  std::vector<int> truth, predicted;
  truth.reserve(preds.size());
  predicted.reserve(preds.size());
  for (const auto& p : preds) {
    truth.push_back(p.truth);
    predicted.push_back(p.predicted);
  }
  return uar(truth, predicted);
}

std::vector<double> per_class_recall(const PredictionSet& preds, int num_classes) {
  std::vector<double> total(num_classes, 0.0), correct(num_classes, 0.0);
  for (const auto& p : preds) {
    total.at(p.truth) += 1.0;
    if (p.predicted == p.truth) correct[p.truth] += 1.0;
  }
  std::vector<double> recall(num_classes, 0.0);
  for (int c = 0; c < num_classes; ++c)
    if (total[c] > 0) recall[c] = correct[c] / total[c];
  return recall;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

ConfidenceInterval bootstrap_ci(const PredictionSet& preds, int replicates,
                                std::uint64_t seed) {
  if (preds.empty()) throw EmptyPredictions("bootstrap of an empty prediction set");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  const std::size_t n = preds.size();
  std::vector<int> truth(n), predicted(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = preds[i].truth;
    predicted[i] = preds[i].predicted;
  }
  std::vector<double> scores(static_cast<std::size_t>(replicates));
  parallel_for(scores.size(), [&](std::size_t r) {
    Rng rng(seed, {0x626f6f74ULL, static_cast<std::uint64_t>(r)});
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t pick = rng.uniform_index(n);
      t[i] = truth[pick];
      p[i] = predicted[pick];
    }
    scores[r] = uar(t, p);
  });
  return {percentile(scores, 0.025), percentile(scores, 0.975)};
}

std::vector<std::vector<double>> confusion(const PredictionSet& preds,
                                           int num_classes) {
  if (preds.empty()) throw EmptyPredictions("confusion of an empty prediction set");
  std::vector<std::vector<double>> m(num_classes, std::vector<double>(num_classes, 0.0));
  std::vector<double> row_total(num_classes, 0.0);
  for (const auto& p : preds) {
    m.at(p.truth).at(p.predicted) += 1.0;
    row_total[p.truth] += 1.0;
  }
  for (int r = 0; r < num_classes; ++r)
    if (row_total[r] > 0)
      for (double& v : m[r]) v /= row_total[r];
  return m;
}

EvaluationReport evaluate(const PredictionSet& preds, int num_classes,
                          int replicates, std::uint64_t seed) {
  EvaluationReport report;
  report.uar = uar(preds);
  report.ci = bootstrap_ci(preds, replicates, seed);
  report.confusion = confusion(preds, num_classes);
  report.per_class_recall = per_class_recall(preds, num_classes);
  report.n = preds.size();
  return report;
}

}  // namespace usv
