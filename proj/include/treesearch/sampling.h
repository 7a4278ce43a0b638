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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "treesearch/lm.h"
#include "treesearch/scoring.h"
#include "treesearch/tree.h"

namespace treesearch {

// SplitMix64 (Steele, Lea & Flood). Pure 64-bit integer arithmetic, so the
// stream for a given seed is identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double NextDouble() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

using Rng = SplitMix64;

enum class SamplerKind { kNormalizedConfidence, kTopKLeaves, kHybrid };

// CLI spelling: "weighted", "topk", "hybrid".
std::string_view ToString(SamplerKind kind);
std::optional<SamplerKind> ParseSamplerKind(std::string_view name);

struct ScoredLeaf {
  NodeId id;
  ConfidenceScore score;
};

// Scales non-negative weights to sum to 1. All-zero input maps to uniform.
// Empty, negative or NaN input raises InputDomainError.
std::vector<double> NormalizeWeights(std::span<const double> weights);

// Index i such that cumsum[i-1] <= u < cumsum[i] over `normalized`; rounding
// slack at the top end goes to the last index with positive weight.
std::size_t PickWeightedIndex(std::span<const double> normalized, double u);

// Chooses min(batch, leaves.size()) distinct leaves.
//   kNormalizedConfidence: weighted draws without replacement, weights
//     proportional to linear confidence, renormalized after every draw.
//   kTopKLeaves: the `batch` best leaves by score, ties to the lower id.
//   kHybrid: weighted draws without replacement from the
//     hybrid_pool_factor * batch best leaves.
// Weighted samplers return ids in draw order; when the whole population is
// selected they return it in input order without touching `rng`.
std::vector<NodeId> SampleLeaves(SamplerKind kind, std::span<const ScoredLeaf> leaves,
                                 std::size_t batch, Rng& rng, std::size_t hybrid_pool_factor = 2);

struct TokenChoice {
  TokenId token;
  double prob;

  friend bool operator==(const TokenChoice&, const TokenChoice&) = default;
};

// The k most probable tokens, descending, ties to the lower id.
// Requires 1 <= k <= dist.size().
std::vector<TokenChoice> TopKTokens(const TokenDistribution& dist, std::size_t k);

}  // namespace treesearch
