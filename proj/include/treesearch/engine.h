// Copyright 2026 The Treesearch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treesearch/lm.h"
#include "treesearch/sampling.h"
#include "treesearch/scoring.h"
#include "treesearch/tree.h"

namespace treesearch {

struct SearchConfig {
  ScorerKind scorer = ScorerKind::kGeometricMean;
  SamplerKind sampler = SamplerKind::kNormalizedConfidence;
  std::size_t k = 3;            // tokens added per extended leaf
  std::size_t batch = 4;        // leaves extended per iteration
  int max_depth = 8;            // generated tokens, prompt excluded
  std::size_t iterations = 32;
  std::size_t max_nodes = 10000;
  std::uint64_t seed = 0;
  EvaluatorHook evaluator;      // empty: model confidence only
  std::size_t top_n = 5;
  std::size_t hybrid_pool_factor = 2;
  std::size_t workers = 1;      // concurrent model queries

  // Throws InputDomainError on the first violated constraint.
  void Validate() const;
};

struct CompletionResult {
  TokenSequence tokens;         // prompt included
  std::string text;
  ConfidenceScore score;
  bool terminal = false;        // ended with the eos token
  int depth = 0;                // generated tokens
  std::optional<NodeId> node;   // set for tree-search results
};

struct SearchStats {
  std::size_t nodes_created = 0;  // root included
  std::size_t iterations_run = 0;
  std::size_t leaves_extended = 0;
  std::size_t terminals_found = 0;
  std::chrono::duration<double> wall_time{0};
};

struct SearchOutcome {
  SearchTree tree;
  std::vector<CompletionResult> results;  // best first
  SearchStats stats;
};

// Confidence-guided tree search. Each iteration samples up to `batch` open
// leaves, extends each with its top-k next tokens, scores the new leaves and
// retires those that hit eos (terminal) or max_depth (non-viable). Stops when
// no open leaf remains, the iteration budget is spent, or the next extension
// would exceed max_nodes. Results are the best top_n leaves of any status,
// ranked by score with ties to the lower node id.
//
// Model queries within an iteration run on up to config.workers threads; tree
// updates and rng draws stay on the calling thread in sampled order, so the
// outcome does not depend on the worker count. A failing model query raises
// ModelQueryError naming the node and its path.
SearchOutcome RunSearch(const LanguageModel& model, std::span<const TokenId> prompt,
                        const SearchConfig& config);

// Ranks leaves best first: higher log score, then lower node id.
std::vector<NodeId> RankLeaves(const SearchTree& tree);

CompletionResult MakeResult(const SearchTree& tree, NodeId id);

}  // namespace treesearch
