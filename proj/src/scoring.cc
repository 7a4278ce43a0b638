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

#include "treesearch/scoring.h"

#include <algorithm>
#include <cstddef>

#include <fmt/format.h>

#include "treesearch/errors.h"

namespace treesearch {

ConfidenceScore ConfidenceScore::FromLog(double log_value) {
  if (std::isnan(log_value) || log_value > 0.0) {
    throw InputDomainError(fmt::format("log confidence {} must be <= 0", log_value));
  }
  ConfidenceScore score;
  score.log_value_ = log_value;
  score.linear_ = std::exp(log_value);
  return score;
}

std::string_view ToString(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::kSumLogprob: return "sumlog";
    case ScorerKind::kGeometricMean: return "geometric";
    case ScorerKind::kArithmeticMean: return "mean";
  }
  return "unknown";
}

std::optional<ScorerKind> ParseScorerKind(std::string_view name) {
  if (name == "sumlog" || name == "sum_logprob") return ScorerKind::kSumLogprob;
  if (name == "geometric" || name == "geometric_mean") return ScorerKind::kGeometricMean;
  if (name == "mean" || name == "arithmetic_mean") return ScorerKind::kArithmeticMean;
  return std::nullopt;
}

ConfidenceScore Score(ScorerKind kind, std::span<const double> token_logprobs) {
  static const double kLogFloor = std::log(kProbabilityFloor);
  if (token_logprobs.empty()) return ConfidenceScore{};

  double log_sum = 0.0;
  double linear_sum = 0.0;
  for (std::size_t i = 0; i < token_logprobs.size(); ++i) {
    double lp = token_logprobs[i];
    if (std::isnan(lp) || lp > 0.0) {
      throw InputDomainError(fmt::format("token log-probability {} at position {} is not <= 0",
                                         lp, i));
    }
    lp = std::max(lp, kLogFloor);
    log_sum += lp;
    if (kind == ScorerKind::kArithmeticMean) linear_sum += std::exp(lp);
  }
  const double n = static_cast<double>(token_logprobs.size());

  switch (kind) {
    case ScorerKind::kSumLogprob:
      return ConfidenceScore::FromLog(log_sum);
    case ScorerKind::kGeometricMean:
      return ConfidenceScore::FromLog(log_sum / n);
    case ScorerKind::kArithmeticMean:
      // Rounding can push the mean a hair above 1.
      return ConfidenceScore::FromLog(std::min(0.0, std::log(linear_sum / n)));
  }
  throw InputDomainError("unknown scorer kind");
}

ConfidenceScore ApplyEvaluator(const ConfidenceScore& base, const EvaluatorHook& hook,
                               std::span<const TokenId> tokens) {
  if (!hook) return base;
  const double factor = hook(tokens);
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw ContractViolation(fmt::format("evaluator returned {}, outside [0, 1]", factor));
  }
  return ConfidenceScore::FromLog(base.log_value() + FlooredLog(factor));
}

int RepetitionExcess(std::span<const TokenId> tokens, int max_run, int ngram_window) {
  int excess = 0;
  const std::size_t n = tokens.size();

  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && tokens[j] == tokens[i]) ++j;
    const auto run = static_cast<int>(j - i);
    if (run > max_run) excess += run - max_run;
    i = j;
  }

  if (ngram_window >= 2) {
    const auto w = static_cast<std::size_t>(ngram_window);
    for (std::size_t i = 0; i + w <= n;) {
      auto gram = tokens.subspan(i, w);
      // Constant grams are single-token runs, already counted above.
      bool constant = std::all_of(gram.begin(), gram.end(),
                                  [&](TokenId t) { return t == gram[0]; });
      std::size_t copies = 1;
      if (!constant) {
        while (i + (copies + 1) * w <= n &&
               std::equal(gram.begin(), gram.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i + copies * w))) {
          ++copies;
        }
      }
      if (copies >= 3) {
        excess += static_cast<int>(copies) - 2;
        i += copies * w;
      } else {
        ++i;
      }
    }
  }
  return excess;
}

EvaluatorHook RepetitionPenaltyHook(int max_run, int ngram_window) {
  if (max_run < 2) throw InputDomainError(fmt::format("max_run {} must be >= 2", max_run));
  if (ngram_window != 0 && ngram_window < 2) {
    throw InputDomainError(fmt::format("ngram_window {} must be 0 or >= 2", ngram_window));
  }
  return [max_run, ngram_window](std::span<const TokenId> tokens) {
    return 1.0 / (1.0 + RepetitionExcess(tokens, max_run, ngram_window));
  };
}

}  // namespace treesearch
