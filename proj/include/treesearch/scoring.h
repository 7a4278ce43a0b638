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

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "treesearch/lm.h"

namespace treesearch {

// Probabilities are floored here before taking logs so that zero-probability
// tokens never produce -inf.
inline constexpr double kProbabilityFloor = 1e-12;

// ln(max(prob, kProbabilityFloor)).
inline double FlooredLog(double prob) {
  return std::log(prob > kProbabilityFloor ? prob : kProbabilityFloor);
}

// A completion's confidence, kept in log space with its linear value cached.
class ConfidenceScore {
 public:
  // Neutral element: linear 1.0.
  constexpr ConfidenceScore() = default;

  // Throws InputDomainError for NaN or a positive log value.
  static ConfidenceScore FromLog(double log_value);

  double log_value() const { return log_value_; }
  double linear() const { return linear_; }

  friend bool operator==(const ConfidenceScore&, const ConfidenceScore&) = default;

 private:
  double log_value_ = 0.0;
  double linear_ = 1.0;
};

enum class ScorerKind { kSumLogprob, kGeometricMean, kArithmeticMean };

// CLI spelling: "sumlog", "geometric", "mean".
std::string_view ToString(ScorerKind kind);
std::optional<ScorerKind> ParseScorerKind(std::string_view name);

// Aggregates per-token log-probabilities (each <= 0) into a confidence score.
// Every entry is floored at ln(kProbabilityFloor) first. An empty sequence
// scores 1.0 for every kind.
//   sum_logprob:     log = sum(lp)
//   geometric_mean:  log = sum(lp) / n
//   arithmetic_mean: linear = sum(exp(lp)) / n
ConfidenceScore Score(ScorerKind kind, std::span<const double> token_logprobs);

// Maps a token sequence to a quality factor in [0, 1].
using EvaluatorHook = std::function<double(std::span<const TokenId>)>;

// Multiplies `base` by hook(tokens) in linear space. A hook value outside
// [0, 1] raises ContractViolation. Factors below kProbabilityFloor are
// floored so the result stays representable in log space.
ConfidenceScore ApplyEvaluator(const ConfidenceScore& base, const EvaluatorHook& hook,
                               std::span<const TokenId> tokens);

// Counts repetition excess in `tokens`:
//  - each maximal run of one token longer than `max_run` adds
//    (run length - max_run);
//  - each maximal tandem repeat of a non-constant n-gram of length
//    `ngram_window` with c >= 3 consecutive copies adds (c - 2).
// ngram_window == 0 disables the n-gram check.
int RepetitionExcess(std::span<const TokenId> tokens, int max_run, int ngram_window);

// Hook returning 1 / (1 + RepetitionExcess(tokens)). Requires max_run >= 2
// and ngram_window == 0 or >= 2.
EvaluatorHook RepetitionPenaltyHook(int max_run, int ngram_window = 2);

}  // namespace treesearch
