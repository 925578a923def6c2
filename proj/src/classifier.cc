// src/classifier.cc

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

#include "usv/classifier.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "usv/error.h"
#include "usv/evaluation.h"
#include "usv/parallel.h"
#include "usv/random.h"
#include "usv/text_io.h"

namespace usv {

void Matrix::push_row(std::span<const double> values) {
  if (rows == 0 && data.empty()) cols = values.size();
  if (values.size() != cols) throw std::invalid_argument("row width mismatch");
  data.insert(data.end(), values.begin(), values.end());
  ++rows;
}

std::vector<double> Standardiser::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

Matrix Standardiser::apply(const Matrix& x) const {
  Matrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto src = x.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) dst[j] = (src[j] - mean[j]) / scale[j];
  }
  return out;
}

Standardiser fit_standardiser(const Matrix& features) {
  if (features.rows == 0) throw std::invalid_argument("fit_standardiser: no rows");
  const std::size_t d = features.cols;
  const double n = static_cast<double>(features.rows);
  Standardiser s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  s.zero_variance.assign(d, false);
  for (std::size_t i = 0; i < features.rows; ++i) {
    auto r = features.row(i);
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
  }
  for (double& m : s.mean) m /= n;
  for (std::size_t i = 0; i < features.rows; ++i) {
    auto r = features.row(i);
    for (std::size_t j = 0; j < d; ++j) s.scale[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
  }
  for (std::size_t j = 0; j < d; ++j) {
    s.scale[j] = std::sqrt(s.scale[j] / n);
    if (!(s.scale[j] > 0.0)) {
      s.scale[j] = 1.0;
      s.zero_variance[j] = true;
    }
  }
  return s;
}

double primal_objective(const Matrix& x, std::span<const int> y,
                        std::span<const double> upper, std::span<const double> w,
                        double bias) {
  double reg = bias * bias;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto r = x.row(i);
    double d = std::inner_product(r.begin(), r.end(), w.begin(), bias);
    loss += upper[i] * std::max(0.0, 1.0 - y[i] * d);
  }
  return 0.5 * reg + loss;
}

SolverResult solve_dual_cd(const Matrix& x, std::span<const int> y,
                           std::span<const double> upper, std::uint64_t seed,
                           const SolverOptions& options) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  if (y.size() != n || upper.size() != n)
    throw std::invalid_argument("solve_dual_cd: size mismatch");
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 1 && y[i] != -1) throw std::invalid_argument("labels must be +1/-1");
    if (upper[i] < 0.0) throw std::invalid_argument("negative sample cost");
    if (upper[i] > 0.0) (y[i] > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg)
    throw SingleClassData("binary SVM needs both classes with positive cost");

  // Augmented diagonal: |x|^2 + 1 for the constant bias feature.
  std::vector<double> q_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    q_diag[i] = std::inner_product(r.begin(), r.end(), r.begin(), 1.0);
  }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (upper[i] > 0.0) order.push_back(i);

  SolverResult result;
  result.w = w;
  double best = primal_objective(x, y, upper, w, b);
  Rng rng(seed, {0x737663ULL});
  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double violation = 0.0;
    for (std::size_t i : order) {
      auto r = x.row(i);
      const double yi = y[i];
      const double g = yi * std::inner_product(r.begin(), r.end(), w.begin(), b) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] >= upper[i]) {
        pg = std::max(g, 0.0);
      }
      violation = std::max(violation, std::abs(pg));
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / q_diag[i], 0.0, upper[i]);
      const double step = (alpha[i] - old) * yi;
      if (step == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) w[j] += step * r[j];
      b += step;
    }
    const double objective = primal_objective(x, y, upper, w, b);
    if (objective < best) {
      best = objective;
      result.w = w;
      result.bias = b;
    }
    result.objective_trace.push_back(best);
    result.epochs = epoch;
    result.final_violation = violation;
    if (violation < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

double BinarySvm::decision(std::span<const double> x) const {
  return std::inner_product(x.begin(), x.end(), w.begin(), bias);
}

BinarySvm train_binary(const Matrix& x, std::span<const int> y, double cost,
                       double weight_pos, double weight_neg, std::uint64_t seed,
                       const SolverOptions& options) {
  std::vector<double> upper(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    upper[i] = cost * (y[i] > 0 ? weight_pos : weight_neg);
  SolverResult solved = solve_dual_cd(x, y, upper, seed, options);
  BinarySvm svm;
  svm.cost = cost;
  svm.w = std::move(solved.w);
  svm.bias = solved.bias;
  return svm;
}

std::vector<double> inverse_frequency_weights(std::span<const int> labels,
                                              int num_classes) {
  std::vector<double> count(num_classes, 0.0);
  for (int l : labels) count.at(l) += 1.0;
  const double n = static_cast<double>(labels.size());
  std::vector<double> weight(num_classes, 0.0);
  for (int k = 0; k < num_classes; ++k)
    if (count[k] > 0) weight[k] = n / (num_classes * count[k]);
  return weight;
}

std::vector<BinarySvm> train_pairs(const Matrix& x, std::span<const int> labels,
                                   int num_classes, double cost,
                                   std::span<const double> class_weights,
                                   std::uint64_t seed,
                                   const SolverOptions& options) {
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) members.at(labels[i]).push_back(i);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < num_classes; ++i)
    for (int j = i + 1; j < num_classes; ++j) pairs.emplace_back(i, j);

  std::vector<BinarySvm> machines(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [ci, cj] = pairs[p];
    BinarySvm& m = machines[p];
    const bool has_i = !members[ci].empty() && class_weights[ci] > 0.0;
    const bool has_j = !members[cj].empty() && class_weights[cj] > 0.0;
    if (!has_i || !has_j) {
      m.w.assign(x.cols, 0.0);
      m.bias = has_i ? 1.0 : has_j ? -1.0 : 0.0;
    } else {
      Matrix sub;
      sub.cols = x.cols;
      std::vector<int> y;
      for (int c : {ci, cj}) {
        for (std::size_t idx : members[c]) {
          sub.push_row(x.row(idx));
          y.push_back(c == ci ? 1 : -1);
        }
      }
      m = train_binary(sub, y, cost, class_weights[ci], class_weights[cj],
                       Rng(seed, {static_cast<std::uint64_t>(ci),
                                  static_cast<std::uint64_t>(cj)})
                           .engine()(),
                       options);
    }
    m.class_i = ci;
    m.class_j = cj;
    m.cost = cost;
  });
  return machines;
}

Vote vote(const OvoModel& model, std::span<const double> x) {
  Vote v;
  v.votes.assign(model.num_classes, 0);
  v.scores.assign(model.num_classes, 0.0);
  for (const BinarySvm& m : model.machines) {
    const double d = m.decision(x);
    const int winner = d >= 0.0 ? m.class_i : m.class_j;
    ++v.votes[winner];
    v.scores[winner] += std::abs(d);
  }
  v.label = 0;
  for (int k = 1; k < model.num_classes; ++k) {
    if (v.votes[k] > v.votes[v.label] ||
        (v.votes[k] == v.votes[v.label] && v.scores[k] > v.scores[v.label]))
      v.label = k;
  }
  return v;
}

int predict_index(const OvoModel& model, std::span<const double> raw) {
  return vote(model, model.standardiser.apply(raw)).label;
}

ContextLabel predict(const OvoModel& model, const FeatureVector& features) {
  auto values = features.values();
  return label_from_index(predict_index(model, values));
}

SelectionResult nested_select(const Matrix& dev_raw, std::span<const int> labels,
                              const std::vector<bool>& is_validation,
                              std::span<const double> grid, int num_classes,
                              std::uint64_t seed, const SolverOptions& options) {
  if (grid.empty()) throw std::invalid_argument("nested_select: empty cost grid");
  if (labels.size() != dev_raw.rows || is_validation.size() != dev_raw.rows)
    throw std::invalid_argument("nested_select: size mismatch");

  SelectionResult result;
  result.model.num_classes = num_classes;
  result.model.standardiser = fit_standardiser(dev_raw);
  const Matrix dev = result.model.standardiser.apply(dev_raw);
  const std::vector<double> weights = inverse_frequency_weights(labels, num_classes);

  Matrix train, val;
  train.cols = val.cols = dev.cols;
  std::vector<int> train_y, val_y;
  for (std::size_t i = 0; i < dev.rows; ++i) {
    if (is_validation[i]) {
      val.push_row(dev.row(i));
      val_y.push_back(labels[i]);
    } else {
      train.push_row(dev.row(i));
      train_y.push_back(labels[i]);
    }
  }

  OvoModel probe = result.model;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double score = 0.0;
    if (!val_y.empty()) {
      probe.cost = grid[g];
      probe.machines = train_pairs(train, train_y, num_classes, grid[g], weights,
                                   seed, options);
      std::vector<int> pred(val.rows);
      for (std::size_t i = 0; i < val.rows; ++i) pred[i] = vote(probe, val.row(i)).label;
      score = uar(val_y, pred);
    }
    result.validation_uar.push_back(score);
    const double best = result.validation_uar[result.chosen];
    if (g > 0 && (score > best || (score == best && grid[g] < grid[result.chosen])))
      result.chosen = g;
  }

  result.model.cost = grid[result.chosen];
  result.model.machines = train_pairs(dev, labels, num_classes, result.model.cost,
                                      weights, seed, options);
  return result;
}

std::string OvoModel::serialise(std::span<const std::string> comments) const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  auto row = [&out](std::string_view key, std::span<const double> values) {
    out += key;
    for (double v : values) out += fmt::format(",{:.17g}", v);
    out += '\n';
  };
  out += fmt::format("classes,{}\n", num_classes);
  out += fmt::format("cost,{:.17g}\n", cost);
  row("mean", standardiser.mean);
  row("std", standardiser.scale);
  for (const BinarySvm& m : machines) {
    out += fmt::format("machine,{},{},{:.17g}", m.class_i, m.class_j, m.bias);
    for (double v : m.w) out += fmt::format(",{:.17g}", v);
    out += '\n';
  }
  return out;
}

OvoModel OvoModel::deserialise(std::string_view text) {
  OvoModel model;
  auto numbers = [](const std::vector<std::string>& f, std::size_t from) {
    std::vector<double> v;
    for (std::size_t i = from; i < f.size(); ++i) v.push_back(std::stod(f[i]));
    return v;
  };
  try {
    for (const std::string& line : data_lines(text)) {
      auto f = split_delimited(line, ',');
      if (f[0] == "classes") {
        model.num_classes = std::stoi(f.at(1));
      } else if (f[0] == "cost") {
        model.cost = std::stod(f.at(1));
      } else if (f[0] == "mean") {
        model.standardiser.mean = numbers(f, 1);
      } else if (f[0] == "std") {
        model.standardiser.scale = numbers(f, 1);
        model.standardiser.zero_variance.assign(model.standardiser.scale.size(), false);
      } else if (f[0] == "machine") {
        BinarySvm m;
        m.class_i = std::stoi(f.at(1));
        m.class_j = std::stoi(f.at(2));
        m.bias = std::stod(f.at(3));
        m.w = numbers(f, 4);
        m.cost = model.cost;
        model.machines.push_back(std::move(m));
      } else {
        throw ParseError("model file: unknown row '" + f[0] + "'");
      }
    }
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  const std::size_t k = static_cast<std::size_t>(model.num_classes);
  if (model.machines.size() != k * (k - 1) / 2)
    throw ParseError("model file: machine count does not match class count");
  return model;
}

}  // namespace usv
