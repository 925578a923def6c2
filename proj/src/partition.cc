// src/partition.cc

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

#include "usv/partition.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "usv/error.h"
#include "usv/random.h"
#include "usv/text_io.h"

namespace usv {

namespace {

using Histogram = std::array<double, kNumContexts>;

struct EmitterInfo {
  std::string id;
  Histogram hist{};
  std::size_t count = 0;
  std::uint64_t tie_key = 0;
};

}  // namespace

std::string_view role_name(FoldRole role) {
  switch (role) {
    case FoldRole::kTest:
      return "test";
    case FoldRole::kTrain:
      return "train";
    case FoldRole::kValidation:
      return "validation";
  }
  return "?";
}

int FoldPlan::test_fold(std::size_t i) const {
  for (int f = 0; f < kFoldCount; ++f)
    if (roles[i][f] == FoldRole::kTest) return f;
  return -1;
}

std::string FoldPlan::to_csv(std::span<const std::string> comments) const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "utterance_id,fold,role\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (int f = 0; f < kFoldCount; ++f)
      out += fmt::format("{},{},{}\n", quote_field(ids[i]), f, role_name(roles[i][f]));
  return out;
}

FoldPlan FoldPlan::from_csv(std::string_view text) {
  auto lines = data_lines(text);
  if (lines.empty() || lines.front() != "utterance_id,fold,role")
    throw ParseError("fold plan: missing 'utterance_id,fold,role' header");
  std::map<std::string, std::array<int, kFoldCount>> seen;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    auto f = split_delimited(lines[l], ',');
    if (f.size() != 3) throw ParseError(fmt::format("fold plan row {}: 3 fields expected", l));
    int fold = -1;
    try {
      fold = std::stoi(f[1]);
    } catch (const std::exception&) {
    }
    if (fold < 0 || fold >= kFoldCount)
      throw ParseError(fmt::format("fold plan row {}: bad fold '{}'", l, f[1]));
    int role = f[2] == "test" ? 0 : f[2] == "train" ? 1 : f[2] == "validation" ? 2 : -1;
    if (role < 0) throw ParseError(fmt::format("fold plan row {}: bad role '{}'", l, f[2]));
    auto [it, inserted] = seen.try_emplace(f[0]);
    if (inserted) it->second.fill(-1);
    if (it->second[fold] != -1)
      throw ParseError(fmt::format("fold plan: duplicate entry for {} fold {}", f[0], fold));
    it->second[fold] = role;
  }
  FoldPlan plan;
  for (auto& [id, r] : seen) {
    std::array<FoldRole, kFoldCount> roles{};
    int tests = 0;
    for (int f = 0; f < kFoldCount; ++f) {
      if (r[f] < 0) throw ParseError("fold plan: " + id + " is missing a fold");
      roles[f] = static_cast<FoldRole>(r[f]);
      tests += roles[f] == FoldRole::kTest;
    }
    if (tests != 1) throw ParseError("fold plan: " + id + " must be tested exactly once");
    plan.ids.push_back(id);
    plan.roles.push_back(roles);
  }
  return plan;
}

double label_l1(std::span<const double> counts, std::span<const double> global) {
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double l1 = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k)
    l1 += std::abs((total > 0 ? counts[k] / total : 0.0) - global[k]);
  return l1;
}

FoldPlan make_folds(std::span<const Utterance> cohort, std::uint64_t seed) {
  std::map<std::string, EmitterInfo> by_emitter;
  Histogram global{};
  for (const Utterance& u : cohort) {
    if (!is_admissible(u.context))
      throw std::invalid_argument("make_folds: inadmissible label for " + u.id);
    EmitterInfo& e = by_emitter[u.emitter_id];
    e.id = u.emitter_id;
    e.hist[label_index(u.context)] += 1.0;
    ++e.count;
    global[label_index(u.context)] += 1.0;
  }
  if (by_emitter.size() < static_cast<std::size_t>(kFoldCount))
    throw TooFewEmitters(fmt::format("need at least {} emitters, got {}",
                                     kFoldCount, by_emitter.size()));

  const double n_total = static_cast<double>(cohort.size());
  for (double& g : global) g /= n_total;

  std::vector<EmitterInfo> emitters;
  for (auto& [id, e] : by_emitter) {
    e.tie_key = fnv1a64(id, fnv1a64(std::to_string(seed)));
    emitters.push_back(std::move(e));
  }
  std::sort(emitters.begin(), emitters.end(),
            [](const EmitterInfo& a, const EmitterInfo& b) {
              if (a.count != b.count) return a.count > b.count;
              if (a.tie_key != b.tie_key) return a.tie_key < b.tie_key;
              return a.id < b.id;
            });

  std::array<Histogram, kFoldCount> group_hist{};
  std::array<double, kFoldCount> group_size{};
  std::map<std::string, int> group_of;
  Rng rng(seed, {0x666f6c64ULL});
  const double target = n_total / kFoldCount;
  // An empty histogram matches no distribution: it scores the maximum L1
  // distance, so the first emitters seed distinct groups.
  auto group_cost = [&](const Histogram& h, double size) {
    double l1 = size > 0.0 ? label_l1(h, global) : 2.0;
    return l1 + kSizePenalty * std::abs(size - target) / n_total;
  };
  for (std::size_t e = 0; e < emitters.size(); ++e) {
    const EmitterInfo& em = emitters[e];
    // Keep every group non-empty: once the remaining emitters are just
    // enough to fill the empty groups, only empty groups are candidates.
    int empty_groups = 0;
    for (double s : group_size) empty_groups += s == 0.0;
    const bool must_fill = emitters.size() - e <= static_cast<std::size_t>(empty_groups);

    std::vector<int> best;
    double best_cost = 0.0;
    for (int g = 0; g < kFoldCount; ++g) {
      if (must_fill && group_size[g] != 0.0) continue;
      Histogram h = group_hist[g];
      for (int k = 0; k < kNumContexts; ++k) h[k] += em.hist[k];
      double size = group_size[g] + static_cast<double>(em.count);
      double cost = group_cost(h, size) - group_cost(group_hist[g], group_size[g]);
      if (best.empty() || cost < best_cost) {
        best = {g};
        best_cost = cost;
      } else if (cost == best_cost) {
        best.push_back(g);
      }
    }
    int g = best.size() == 1 ? best.front() : best[rng.uniform_index(best.size())];
    for (int k = 0; k < kNumContexts; ++k) group_hist[g][k] += em.hist[k];
    group_size[g] += static_cast<double>(em.count);
    group_of[em.id] = g;
  }

  std::vector<std::size_t> order(cohort.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cohort[a].id < cohort[b].id;
  });
  FoldPlan plan;
  plan.seed = seed;
  for (std::size_t i : order) {
    const Utterance& u = cohort[i];
    if (!plan.ids.empty() && plan.ids.back() == u.id)
      throw std::invalid_argument("make_folds: duplicate utterance id " + u.id);
    plan.ids.push_back(u.id);
    plan.emitters.push_back(u.emitter_id);
    plan.labels.push_back(u.context);
    std::array<FoldRole, kFoldCount> roles;
    roles.fill(FoldRole::kTrain);
    roles[group_of.at(u.emitter_id)] = FoldRole::kTest;
    plan.roles.push_back(roles);
  }
  return plan;
}

void split_dev(FoldPlan& plan, int fold, std::uint64_t seed) {
  if (fold < 0 || fold >= kFoldCount)
    throw std::out_of_range(fmt::format("fold index {} out of range", fold));
  if (plan.labels.size() != plan.ids.size())
    throw std::invalid_argument("split_dev: plan carries no labels");
  std::array<std::vector<std::size_t>, kNumContexts> dev_by_label;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (plan.roles[i][fold] == FoldRole::kTest) continue;
    plan.roles[i][fold] = FoldRole::kTrain;
    dev_by_label[label_index(plan.labels[i])].push_back(i);
  }
  for (int k = 0; k < kNumContexts; ++k) {
    auto& items = dev_by_label[k];
    const std::size_t n = items.size();
    const std::size_t n_val = (3 * n + 5) / 10;  // round(0.3 n), half up
    Rng rng(seed, {static_cast<std::uint64_t>(fold), static_cast<std::uint64_t>(k)});
    std::shuffle(items.begin(), items.end(), rng.engine());
    for (std::size_t j = 0; j < n_val; ++j)
      plan.roles[items[j]][fold] = FoldRole::kValidation;
  }
}

}  // namespace usv
