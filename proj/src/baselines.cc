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

#include "treesearch/baselines.h"

#include <algorithm>
#include <utility>

#include <fmt/format.h>

#include "treesearch/errors.h"
#include "treesearch/sampling.h"
#include "treesearch/scoring.h"

namespace treesearch {
namespace {

struct Hypothesis {
  TokenSequence tokens;          // prompt included
  std::vector<double> logprobs;  // generated tokens only
  double total = 0.0;
  bool finished = false;
};

bool Better(const Hypothesis& a, const Hypothesis& b) {
  if (a.total != b.total) return a.total > b.total;
  return a.tokens < b.tokens;
}

CompletionResult ToResult(const Vocabulary& vocab, const Hypothesis& h) {
  CompletionResult result;
  result.tokens = h.tokens;
  result.text = vocab.Render(h.tokens);
  result.score = Score(ScorerKind::kSumLogprob, h.logprobs);
  result.terminal = h.finished;
  result.depth = static_cast<int>(h.logprobs.size());
  return result;
}

}  // namespace

CompletionResult GreedyDecode(const LanguageModel& model, std::span<const TokenId> prompt,
                              int max_len) {
  if (max_len < 1) throw InputDomainError(fmt::format("max_len {} must be >= 1", max_len));
  const Vocabulary& vocab = model.vocabulary();
  Hypothesis h{{prompt.begin(), prompt.end()}, {}, 0.0, false};
  for (int step = 0; step < max_len && !h.finished; ++step) {
    const TokenChoice best = TopKTokens(model.NextDistribution(h.tokens), 1).front();
    h.tokens.push_back(best.token);
    h.logprobs.push_back(FlooredLog(best.prob));
    h.finished = vocab.IsEos(best.token);
  }
  return ToResult(vocab, h);
}

std::vector<CompletionResult> BeamSearch(const LanguageModel& model,
                                         std::span<const TokenId> prompt, std::size_t width,
                                         int max_len) {
  if (width < 1) throw InputDomainError("beam width must be >= 1");
  if (max_len < 1) throw InputDomainError(fmt::format("max_len {} must be >= 1", max_len));
  const Vocabulary& vocab = model.vocabulary();

  std::vector<Hypothesis> live{{{prompt.begin(), prompt.end()}, {}, 0.0, false}};
  std::vector<Hypothesis> finished;
  std::vector<Hypothesis> candidates;
  for (int step = 0; step < max_len && !live.empty(); ++step) {
    candidates.clear();
    for (const Hypothesis& h : live) {
      const TokenDistribution dist = model.NextDistribution(h.tokens);
      for (TokenId t = 0; t < static_cast<TokenId>(dist.size()); ++t) {
        Hypothesis next = h;
        const double lp = FlooredLog(dist[t]);
        next.tokens.push_back(t);
        next.logprobs.push_back(lp);
        next.total += lp;
        next.finished = vocab.IsEos(t);
        candidates.push_back(std::move(next));
      }
    }
    const std::size_t keep = std::min(width, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), Better);
    live.clear();
    for (std::size_t i = 0; i < keep; ++i) {
      (candidates[i].finished ? finished : live).push_back(std::move(candidates[i]));
    }
  }

  for (auto& h : live) finished.push_back(std::move(h));
  std::sort(finished.begin(), finished.end(), Better);
  if (finished.size() > width) finished.resize(width);
  std::vector<CompletionResult> results;
  results.reserve(finished.size());
  for (const auto& h : finished) results.push_back(ToResult(vocab, h));
  return results;
}

}  // namespace treesearch
