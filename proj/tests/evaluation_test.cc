// tests/evaluation_test.cc

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

#include "doctest.h"

#include <algorithm>
#include <cstring>
#include <map>
#include <random>
#include <set>

#include "usv/error.h"
#include "usv/evaluation.h"

using namespace usv;

namespace {

PredictionSet make_preds(const std::vector<int>& truth, const std::vector<int>& pred) {
  PredictionSet out;
  for (std::size_t i = 0; i < truth.size(); ++i)
    out.push_back({"u" + std::to_string(i), truth[i], pred[i], static_cast<int>(i % 3)});
  return out;
}

// Mean recall over classes present, by counting.
double naive_uar(const std::vector<int>& truth, const std::vector<int>& pred) {
  std::map<int, std::pair<int, int>> c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++c[truth[i]].second;
    c[truth[i]].first += truth[i] == pred[i];
  }
  double s = 0;
  for (auto& [k, v] : c) s += static_cast<double>(v.first) / v.second;
  return s / c.size();
}

// Exact bootstrap distribution of UAR by enumerating every index tuple.
std::vector<double> exact_bootstrap(const std::vector<int>& truth, const std::vector<int>& pred) {
  const std::size_t n = truth.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= n;
  std::vector<double> out;
  std::vector<int> t(n), p(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = truth[c % n];
      p[i] = pred[c % n];
      c /= n;
    }
    out.push_back(naive_uar(t, p));
  }
  std::sort(out.begin(), out.end());
  return out;
}

constexpr double kBootLow = 0.52142992424242418;
constexpr double kBootHigh = 0.81897186147186152;

}  // namespace

TEST_CASE("uar examples") {
  CHECK(uar(make_preds({0, 1, 2, 2, 5}, {0, 1, 2, 2, 5})) == 1.0);
  CHECK(uar(make_preds({0, 0, 1, 1}, {0, 1, 1, 1})) == 0.75);
  std::vector<int> truth, pred;
  for (int k = 0; k < 11; ++k)
    for (int r = 0; r <= k; ++r) {
      truth.push_back(k);
      pred.push_back(4);
    }
  CHECK(uar(truth, pred) == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("empty inputs") {
  PredictionSet empty;
  CHECK_THROWS_AS(uar(empty), EmptyPredictions);
  CHECK_THROWS_AS(bootstrap_ci(empty), EmptyPredictions);
  CHECK_THROWS_AS(confusion(empty, 11), EmptyPredictions);
}

TEST_CASE("bootstrap degenerate cases") {
  auto all_right = make_preds({0, 1, 2, 3, 3, 7}, {0, 1, 2, 3, 3, 7});
  auto ci = bootstrap_ci(all_right, 1000, 5);
  CHECK(ci.low == 1.0);
  CHECK(ci.high == 1.0);
  auto one = make_preds({4}, {4});
  ci = bootstrap_ci(one, 1000, 5);
  CHECK(ci.low == 1.0);
  CHECK(ci.high == 1.0);
}

TEST_CASE("bootstrap of the 0.75 example") {
  auto preds = make_preds({0, 0, 1, 1}, {0, 1, 1, 1});
  auto a = bootstrap_ci(preds, 1000, 0);
  auto b = bootstrap_ci(preds, 1000, 0);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  CHECK(0.0 <= a.low);
  CHECK(a.low <= a.high);
  CHECK(a.high <= 1.0);

  // The exact bootstrap distribution has 2.5% / 97.5% quantiles at 0.5 and
  // 1.0; 1000 seeded replicates must land on the same atoms.
  auto exact = exact_bootstrap({0, 0, 1, 1}, {0, 1, 1, 1});
  CHECK(percentile(exact, 0.025) == 0.5);
  CHECK(percentile(exact, 0.975) == 1.0);
  CHECK(a.low == 0.5);
  CHECK(a.high == 1.0);
}

TEST_CASE("bootstrap regression values") {
  // 40 predictions over 4 classes; values pinned from a reference run.
  std::mt19937 gen(2024);
  std::vector<int> truth, pred;
  for (int i = 0; i < 40; ++i) {
    truth.push_back(i % 4);
    pred.push_back(gen() % 3 == 0 ? static_cast<int>(gen() % 4) : i % 4);
  }
  auto preds = make_preds(truth, pred);
  auto ci = bootstrap_ci(preds, 1000, 17);
  CHECK(ci.low == doctest::Approx(kBootLow).epsilon(1e-12));
  CHECK(ci.high == doctest::Approx(kBootHigh).epsilon(1e-12));
  CHECK(ci.low <= uar(preds));
  CHECK(uar(preds) <= ci.high);
  auto other = bootstrap_ci(preds, 1000, 18);
  CHECK((other.low != ci.low || other.high != ci.high));
}

TEST_CASE("percentile interpolation") {
  CHECK(percentile({3.0, 1.0, 2.0, 4.0}, 0.5) == 2.5);
  CHECK(percentile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.025) == doctest::Approx(1.1));
  CHECK(percentile({1.0, 2.0, 3.0, 4.0, 5.0}, 1.0) == 5.0);
  CHECK(percentile({7.0}, 0.3) == 7.0);
}

TEST_CASE("confusion matrix") {
  auto perfect = confusion(make_preds({0, 1, 2}, {0, 1, 2}), 3);
  CHECK(perfect == std::vector<std::vector<double>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  auto m = confusion(make_preds({0, 0, 1, 1}, {0, 1, 1, 1}), 3);
  CHECK(m[0] == std::vector<double>{0.5, 0.5, 0});
  CHECK(m[1] == std::vector<double>{0, 1, 0});
  CHECK(m[2] == std::vector<double>{0, 0, 0});
}

TEST_CASE("report invariants on random predictions") {
  std::mt19937 gen(8);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 5 + static_cast<int>(gen() % 200);
    std::vector<int> truth, pred;
    for (int i = 0; i < n; ++i) {
      truth.push_back(static_cast<int>(gen() % 11));
      pred.push_back(gen() % 2 ? truth.back() : static_cast<int>(gen() % 11));
    }
    auto preds = make_preds(truth, pred);
    EvaluationReport r = evaluate(preds, 11, 200, trial);
    CHECK(r.n == static_cast<std::size_t>(n));
    CHECK(r.uar == doctest::Approx(naive_uar(truth, pred)).epsilon(1e-12));
    CHECK(r.ci.low <= r.ci.high);
    std::set<int> present(truth.begin(), truth.end());
    double diag = 0, recall = 0;
    for (int k = 0; k < 11; ++k) {
      double sum = 0;
      for (double v : r.confusion[k]) sum += v;
      if (present.contains(k)) {
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        diag += r.confusion[k][k];
        recall += r.per_class_recall[k];
      } else {
        CHECK(sum == 0.0);
        CHECK(r.per_class_recall[k] == 0.0);
      }
    }
    CHECK(diag / present.size() == doctest::Approx(r.uar).epsilon(1e-12));
    CHECK(recall / present.size() == doctest::Approx(r.uar).epsilon(1e-12));

    // Duplicating every prediction of one class leaves the UAR unchanged.
    PredictionSet dup = preds;
    for (const auto& p : preds)
      if (p.truth == truth[0])
        for (int d = 0; d < 2; ++d) dup.push_back(p);
    CHECK(uar(dup) == doctest::Approx(r.uar).epsilon(1e-12));
  }
}

TEST_CASE("uar equals accuracy for balanced classes") {
  std::vector<int> truth, pred;
  int correct = 0;
  for (int i = 0; i < 99; ++i) {
    truth.push_back(i % 11);
    pred.push_back(i % 7 == 0 ? (i + 1) % 11 : i % 11);
    correct += truth.back() == pred.back();
  }
  CHECK(uar(truth, pred) == doctest::Approx(correct / 99.0).epsilon(1e-12));
}
