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

#include "treesearch/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "treesearch/errors.h"

namespace treesearch {

std::string_view ToString(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kNormalizedConfidence: return "weighted";
    case SamplerKind::kTopKLeaves: return "topk";
    case SamplerKind::kHybrid: return "hybrid";
  }
  return "unknown";
}

std::optional<SamplerKind> ParseSamplerKind(std::string_view name) {
  if (name == "weighted" || name == "normalized_confidence") return SamplerKind::kNormalizedConfidence;
  if (name == "topk" || name == "top_k_leaves") return SamplerKind::kTopKLeaves;
  if (name == "hybrid") return SamplerKind::kHybrid;
  return std::nullopt;
}

std::vector<double> NormalizeWeights(std::span<const double> weights) {
  if (weights.empty()) throw InputDomainError("cannot normalize an empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || std::isinf(w)) {
      throw InputDomainError(fmt::format("weight {} is not a finite non-negative value", w));
    }
    total += w;
  }
  std::vector<double> out(weights.size());
  if (total == 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(weights.size()));
    return out;
  }
  std::transform(weights.begin(), weights.end(), out.begin(), [total](double w) { return w / total; });
  return out;
}

std::size_t PickWeightedIndex(std::span<const double> normalized, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    if (normalized[i] <= 0.0) continue;
    last_positive = i;
    cumulative += normalized[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

namespace {

// Best first: higher log score, then lower id.
bool Outranks(const ScoredLeaf& a, const ScoredLeaf& b) {
  if (a.score.log_value() != b.score.log_value()) return a.score.log_value() > b.score.log_value();
  return a.id < b.id;
}

// Prefix sums over leaf weights for O(log n) draws and removals.
class FenwickTree {
 public:
  explicit FenwickTree(std::span<const double> weights) : tree_(weights.size() + 1, 0.0) {
    for (std::size_t i = 0; i < weights.size(); ++i) Add(i, weights[i]);
    for (highest_ = 1; highest_ * 2 <= weights.size(); highest_ *= 2) {
    }
  }

  void Add(std::size_t index, double delta) {
    for (std::size_t i = index + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  double Total() const {
    double sum = 0.0;
    for (std::size_t i = tree_.size() - 1; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

  // Number of leading elements whose running sum stays <= target.
  std::size_t Find(double target) const {
    std::size_t pos = 0;
    for (std::size_t step = highest_; step > 0; step >>= 1) {
      if (pos + step < tree_.size() && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<double> tree_;
  std::size_t highest_ = 1;
};

std::vector<NodeId> WeightedWithoutReplacement(std::span<const ScoredLeaf> pool,
                                               std::size_t batch, Rng& rng) {
  std::vector<NodeId> picked;
  if (batch >= pool.size()) {
    for (const auto& leaf : pool) picked.push_back(leaf.id);
    return picked;
  }
  // Weights relative to the best leaf keep deep sum-logprob scores from
  // underflowing; proportions are unchanged.
  double best = pool.front().score.log_value();
  for (const auto& leaf : pool) best = std::max(best, leaf.score.log_value());
  std::vector<double> weights;
  weights.reserve(pool.size());
  for (const auto& leaf : pool) weights.push_back(std::exp(leaf.score.log_value() - best));

  FenwickTree sums(weights);
  std::vector<bool> taken(pool.size(), false);
  std::size_t positive = static_cast<std::size_t>(
      std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));

  picked.reserve(batch);
  while (picked.size() < batch) {
    const double u = rng.NextDouble();
    std::size_t index = pool.size();
    double total = sums.Total();
    if (positive > 0 && !(total > 0.0)) {
      // Accumulated removal residue swamped the remaining mass.
      sums = FenwickTree(weights);
      total = sums.Total();
    }
    if (positive > 0 && total > 0.0) {
      index = sums.Find(u * total);
      // Rounding residue can land on a spent slot or past the end.
      if (index >= pool.size() || taken[index] || weights[index] <= 0.0) {
        std::size_t fwd = std::min(index, pool.size() - 1);
        while (fwd < pool.size() && (taken[fwd] || weights[fwd] <= 0.0)) ++fwd;
        if (fwd < pool.size()) {
          index = fwd;
        } else {
          index = std::min(index, pool.size() - 1);
          while (taken[index] || weights[index] <= 0.0) --index;
        }
      }
    } else {
      // Every remaining weight is zero: uniform over what is left.
      std::size_t remaining = pool.size() - picked.size();
      auto target = static_cast<std::size_t>(u * static_cast<double>(remaining));
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (taken[i]) continue;
        if (target-- == 0) {
          index = i;
          break;
        }
      }
    }
    picked.push_back(pool[index].id);
    taken[index] = true;
    if (weights[index] > 0.0) {
      sums.Add(index, -weights[index]);
      weights[index] = 0.0;
      --positive;
    }
  }
  return picked;
}

}  // namespace

std::vector<NodeId> SampleLeaves(SamplerKind kind, std::span<const ScoredLeaf> leaves,
                                 std::size_t batch, Rng& rng, std::size_t hybrid_pool_factor) {
  if (leaves.empty()) throw InputDomainError("no leaves to sample from");
  if (batch < 1) throw InputDomainError("batch size must be >= 1");
  for (const auto& leaf : leaves) {
    if (std::isnan(leaf.score.log_value())) throw InputDomainError("leaf score is NaN");
  }

  switch (kind) {
    case SamplerKind::kNormalizedConfidence:
      return WeightedWithoutReplacement(leaves, batch, rng);

    case SamplerKind::kTopKLeaves: {
      std::vector<ScoredLeaf> ranked(leaves.begin(), leaves.end());
      const std::size_t n = std::min(batch, ranked.size());
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end(),
                        Outranks);
      std::vector<NodeId> picked;
      for (std::size_t i = 0; i < n; ++i) picked.push_back(ranked[i].id);
      return picked;
    }

    case SamplerKind::kHybrid: {
      if (hybrid_pool_factor < 1) throw InputDomainError("hybrid pool factor must be >= 1");
      std::vector<ScoredLeaf> ranked(leaves.begin(), leaves.end());
      const std::size_t pool = std::min(ranked.size(), hybrid_pool_factor * batch);
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(pool),
                        ranked.end(), Outranks);
      ranked.resize(pool);
      return WeightedWithoutReplacement(ranked, batch, rng);
    }
  }
  throw InputDomainError("unknown sampler kind");
}

std::vector<TokenChoice> TopKTokens(const TokenDistribution& dist, std::size_t k) {
  if (k < 1 || k > dist.size()) {
    throw InputDomainError(fmt::format("k = {} outside [1, {}]", k, dist.size()));
  }
  std::vector<TokenId> order(dist.size());
  std::iota(order.begin(), order.end(), TokenId{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](TokenId a, TokenId b) {
                      if (dist[a] != dist[b]) return dist[a] > dist[b];
                      return a < b;
                    });
  std::vector<TokenChoice> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({order[i], dist[order[i]]});
  return out;
}

}  // namespace treesearch
