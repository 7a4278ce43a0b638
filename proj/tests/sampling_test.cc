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
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "treesearch/errors.h"

namespace treesearch {
namespace {

std::vector<ScoredLeaf> Leaves(std::initializer_list<double> linear_scores) {
  std::vector<ScoredLeaf> out;
  std::uint32_t id = 10;
  for (double s : linear_scores) out.push_back({NodeId{id++}, ConfidenceScore::FromLog(std::log(s))});
  return out;
}

TEST(SplitMix64Test, ReferenceStream) {
  // Reference values for seed 1234567 from the published SplitMix64 code.
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng.Next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.Next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.Next(), 9817491932198370423ULL);
  EXPECT_EQ(rng.Next(), 4593380528125082431ULL);
  EXPECT_EQ(rng.Next(), 16408922859458223821ULL);
}

TEST(SplitMix64Test, DoublesInUnitInterval) {
  SplitMix64 rng(0);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.NextDouble();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(NormalizeWeightsTest, Proportional) {
  auto w = NormalizeWeights(std::vector<double>{2, 3, 5});
  EXPECT_NEAR(w[0], 0.2, 1e-15);
  EXPECT_NEAR(w[1], 0.3, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
}

TEST(NormalizeWeightsTest, AllZeroFallsBackToUniform) {
  auto w = NormalizeWeights(std::vector<double>{0, 0, 0});
  for (double x : w) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
}

TEST(NormalizeWeightsTest, SingletonAndErrors) {
  EXPECT_EQ(NormalizeWeights(std::vector<double>{0.7}), std::vector<double>{1.0});
  EXPECT_THROW(NormalizeWeights(std::vector<double>{}), InputDomainError);
  EXPECT_THROW(NormalizeWeights(std::vector<double>{1.0, -0.5}), InputDomainError);
  EXPECT_THROW(NormalizeWeights(std::vector<double>{std::nan("")}), InputDomainError);
}

TEST(NormalizeWeightsTest, SumsToOneOnRandomInput) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> w(0.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> weights(1 + static_cast<std::size_t>(i % 40));
    for (auto& x : weights) x = w(rng);
    auto n = NormalizeWeights(weights);
    EXPECT_NEAR(std::accumulate(n.begin(), n.end(), 0.0), 1.0, 1e-9);
  }
}

// The measure of u in [0, 1) mapped to each index equals its weight.
TEST(PickWeightedIndexTest, EnumeratedMappingMatchesWeights) {
  const std::vector<double> weights = {0.2, 0.3, 0.5};
  const int grid = 1'000'000;
  std::vector<int> hits(weights.size(), 0);
  for (int i = 0; i < grid; ++i) {
    ++hits[PickWeightedIndex(weights, (i + 0.5) / grid)];
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    EXPECT_NEAR(static_cast<double>(hits[i]) / grid, weights[i], 1e-6);
  }
  EXPECT_EQ(PickWeightedIndex(std::vector<double>{0.5, 0.5, 0.0}, 0.999999999999), 1u);
}

TEST(SampleLeavesTest, ClampsToPopulation) {
  SplitMix64 rng(1);
  auto leaves = Leaves({0.4, 0.6});
  for (auto kind : {SamplerKind::kNormalizedConfidence, SamplerKind::kTopKLeaves,
                    SamplerKind::kHybrid}) {
    auto picked = SampleLeaves(kind, leaves, 5, rng);
    std::set<NodeId> unique(picked.begin(), picked.end());
    EXPECT_EQ(picked.size(), 2u);
    EXPECT_EQ(unique, (std::set<NodeId>{NodeId{10}, NodeId{11}}));
  }
}

TEST(SampleLeavesTest, TopKLeavesPicksBestWithLowIdTieBreak) {
  SplitMix64 rng(1);
  auto picked = SampleLeaves(SamplerKind::kTopKLeaves, Leaves({0.9, 0.1, 0.5}), 2, rng);
  EXPECT_EQ(picked, (std::vector<NodeId>{NodeId{10}, NodeId{12}}));
  auto tied = SampleLeaves(SamplerKind::kTopKLeaves, Leaves({0.3, 0.7, 0.7, 0.7}), 2, rng);
  EXPECT_EQ(tied, (std::vector<NodeId>{NodeId{11}, NodeId{12}}));
}

TEST(SampleLeavesTest, EmptyLeavesIsAnError) {
  SplitMix64 rng(1);
  EXPECT_THROW(SampleLeaves(SamplerKind::kTopKLeaves, {}, 1, rng), InputDomainError);
  EXPECT_THROW(SampleLeaves(SamplerKind::kTopKLeaves, Leaves({0.5}), 0, rng), InputDomainError);
}

TEST(SampleLeavesTest, SingleDrawFollowsTheWeightedMapping) {
  auto leaves = Leaves({0.2, 0.3, 0.5});
  const auto weights = NormalizeWeights(std::vector<double>{0.2, 0.3, 0.5});
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    SplitMix64 rng(seed), mirror(seed);
    auto picked = SampleLeaves(SamplerKind::kNormalizedConfidence, leaves, 1, rng);
    ASSERT_EQ(picked.size(), 1u);
    EXPECT_EQ(picked[0], leaves[PickWeightedIndex(weights, mirror.NextDouble())].id);
  }
}

TEST(SampleLeavesTest, WeightedFrequencies) {
  auto leaves = Leaves({0.2, 0.3, 0.5});
  SplitMix64 rng(2024);
  std::vector<int> counts(3, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    auto picked = SampleLeaves(SamplerKind::kNormalizedConfidence, leaves, 1, rng);
    ++counts[picked[0].value - 10];
  }
  EXPECT_NEAR(counts[0] / double(draws), 0.2, 0.02);
  EXPECT_NEAR(counts[1] / double(draws), 0.3, 0.02);
  EXPECT_NEAR(counts[2] / double(draws), 0.5, 0.02);
}

// Second-draw marginals of sequential without-replacement sampling:
// P(first=i, second=j) = w_i * w_j / (1 - w_i).
TEST(SampleLeavesTest, WithoutReplacementPairFrequencies) {
  auto leaves = Leaves({0.2, 0.3, 0.5});
  const std::vector<double> w = {0.2, 0.3, 0.5};
  SplitMix64 rng(77);
  std::vector<std::vector<int>> pairs(3, std::vector<int>(3, 0));
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    auto picked = SampleLeaves(SamplerKind::kNormalizedConfidence, leaves, 2, rng);
    ASSERT_NE(picked[0], picked[1]);
    ++pairs[picked[0].value - 10][picked[1].value - 10];
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      EXPECT_NEAR(pairs[a][b] / double(draws), w[a] * w[b] / (1 - w[a]), 0.015);
    }
  }
}

TEST(SampleLeavesTest, DistinctListedAndDeterministic) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> score(1e-5, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScoredLeaf> leaves;
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 37);
    for (std::uint32_t i = 0; i < n; ++i) {
      leaves.push_back({NodeId{i * 3}, ConfidenceScore::FromLog(std::log(score(gen)))});
    }
    const std::size_t batch = 1 + static_cast<std::size_t>(trial % 11);
    for (auto kind : {SamplerKind::kNormalizedConfidence, SamplerKind::kTopKLeaves,
                      SamplerKind::kHybrid}) {
      SplitMix64 a(static_cast<std::uint64_t>(trial)), b(static_cast<std::uint64_t>(trial));
      auto first = SampleLeaves(kind, leaves, batch, a);
      auto second = SampleLeaves(kind, leaves, batch, b);
      EXPECT_EQ(first, second);
      EXPECT_EQ(first.size(), std::min(batch, n));
      std::set<NodeId> unique(first.begin(), first.end());
      EXPECT_EQ(unique.size(), first.size());
      for (NodeId id : first) {
        EXPECT_TRUE(std::any_of(leaves.begin(), leaves.end(), [&](auto& l) { return l.id == id; }));
      }
    }
  }
}

TEST(SampleLeavesTest, HybridDrawsOnlyFromThePool) {
  // Pool of 2B = 4 best leaves out of 10.
  auto leaves = Leaves({0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.05, 0.6, 0.01, 0.02});
  const std::set<NodeId> pool = {NodeId{11}, NodeId{13}, NodeId{15}, NodeId{17}};
  SplitMix64 rng(3);
  std::set<NodeId> seen;
  for (int i = 0; i < 500; ++i) {
    for (NodeId id : SampleLeaves(SamplerKind::kHybrid, leaves, 2, rng)) {
      EXPECT_TRUE(pool.count(id)) << id.value;
      seen.insert(id);
    }
  }
  EXPECT_EQ(seen, pool);
}

TEST(SampleLeavesTest, DeepSumLogScoresDoNotUnderflow) {
  std::vector<ScoredLeaf> leaves = {{NodeId{0}, ConfidenceScore::FromLog(-2000.0)},
                                    {NodeId{1}, ConfidenceScore::FromLog(-2000.0 + std::log(3.0))}};
  SplitMix64 rng(5);
  int second = 0;
  for (int i = 0; i < 4000; ++i) {
    second += SampleLeaves(SamplerKind::kNormalizedConfidence, leaves, 1, rng)[0] == NodeId{1};
  }
  EXPECT_NEAR(second / 4000.0, 0.75, 0.03);
}

TEST(TopKTokensTest, OrderStatistics) {
  TokenDistribution dist({0.5, 0.3, 0.15, 0.05});
  EXPECT_EQ(TopKTokens(dist, 2), (std::vector<TokenChoice>{{0, 0.5}, {1, 0.3}}));
}

TEST(TopKTokensTest, TiesGoToLowerId) {
  auto top = TopKTokens(TokenDistribution::Uniform(4), 2);
  EXPECT_EQ(top[0].token, 0);
  EXPECT_EQ(top[1].token, 1);
}

TEST(TopKTokensTest, RangeChecks) {
  TokenDistribution dist({0.5, 0.5});
  EXPECT_THROW(TopKTokens(dist, 0), InputDomainError);
  EXPECT_THROW(TopKTokens(dist, 3), InputDomainError);
}

TEST(TopKTokensTest, MatchesFullSortOracle) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> coarse(0, 5);  // coarse values force ties
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t v = 1 + static_cast<std::size_t>(trial % 12);
    std::vector<double> probs(v);
    double total = 0;
    for (auto& p : probs) total += (p = coarse(rng) + 0.5);
    for (auto& p : probs) p /= total;
    TokenDistribution dist(probs);
    std::vector<TokenChoice> full;
    for (TokenId t = 0; t < static_cast<TokenId>(v); ++t) full.push_back({t, probs[t]});
    std::sort(full.begin(), full.end(), [](auto& a, auto& b) {
      return a.prob != b.prob ? a.prob > b.prob : a.token < b.token;
    });
    for (std::size_t k = 1; k <= v; ++k) {
      EXPECT_EQ(TopKTokens(dist, k), std::vector<TokenChoice>(full.begin(), full.begin() + k));
    }
  }
}

}  // namespace
}  // namespace treesearch
