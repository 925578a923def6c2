// include/usv/partition.h

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

#ifndef USV_PARTITION_H_
#define USV_PARTITION_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usv/corpus.h"

namespace usv {

inline constexpr int kFoldCount = 3;
inline constexpr double kValidationShare = 0.3;
// Weight of the size-imbalance term in the emitter assignment cost.
inline constexpr double kSizePenalty = 1.0;

enum class FoldRole { kTest, kTrain, kValidation };

std::string_view role_name(FoldRole role);

// Every utterance is the test item of exactly one fold and a dev item (train
// or validation) of the other two. Entries are sorted by utterance id.
struct FoldPlan {
  std::uint64_t seed = 0;
  std::vector<std::string> ids;
  std::vector<std::string> emitters;  // empty when loaded from CSV
  std::vector<ContextLabel> labels;   // empty when loaded from CSV
  std::vector<std::array<FoldRole, kFoldCount>> roles;

  std::size_t size() const { return ids.size(); }
  int test_fold(std::size_t i) const;

  // `utterance_id,fold,role` rows, preceded by the given comment lines.
  std::string to_csv(std::span<const std::string> comments = {}) const;
  static FoldPlan from_csv(std::string_view text);
};

// Subject-independent 3-fold plan. Each group g has cost
//   L1(label distribution of g, global distribution)
//     + kSizePenalty * |size of g - N/3| / N
// where an empty group scores the maximum L1 of 2. Emitters are visited in
// descending utterance count and each joins the group whose cost increases
// least, i.e. the one minimising the summed cost over all groups. Exact ties
// (in visiting order or cost) are broken by the seed. Group f is the test
// set of fold f; all dev items start as kTrain until split_dev is called.
// Throws TooFewEmitters (< 3).
FoldPlan make_folds(std::span<const Utterance> cohort, std::uint64_t seed);

// Per-label stratified 70/30 train/validation split of fold `fold`'s dev
// set: round(0.3 * n) items of each label go to validation, chosen uniformly
// under the seed. Throws std::out_of_range for a bad fold index.
void split_dev(FoldPlan& plan, int fold, std::uint64_t seed);

// L1 distance between a label histogram (normalised) and a distribution.
double label_l1(std::span<const double> counts, std::span<const double> global);

}  // namespace usv

#endif  // USV_PARTITION_H_
