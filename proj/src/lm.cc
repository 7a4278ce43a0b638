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

#include "treesearch/lm.h"

#include <cmath>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "treesearch/errors.h"

namespace treesearch {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::optional<TokenId> eos_id)
    : tokens_(std::move(tokens)), eos_id_(eos_id) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) {
      throw InputDomainError(fmt::format("vocabulary token {} is empty", i));
    }
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw InputDomainError(fmt::format("duplicate vocabulary token '{}'", tokens_[i]));
    }
  }
  if (eos_id_ && !Contains(*eos_id_)) {
    throw InputDomainError(fmt::format("eos id {} outside vocabulary of size {}", *eos_id_,
                                       tokens_.size()));
  }
}

const std::string& Vocabulary::token(TokenId id) const {
  if (!Contains(id)) {
    throw InputDomainError(fmt::format("token id {} outside vocabulary of size {}", id, size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenSequence Vocabulary::Tokenize(std::string_view text) const {
  TokenSequence ids;
  for (const auto& piece : SplitWhitespace(text)) {
    auto id = Find(piece);
    if (!id) throw InputDomainError(fmt::format("unknown token '{}'", piece));
    ids.push_back(*id);
  }
  return ids;
}

std::string Vocabulary::Render(std::span<const TokenId> ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ' ';
    out += token(ids[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// TokenDistribution

TokenDistribution::TokenDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InputDomainError("distribution over an empty vocabulary");
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    double p = probs_[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputDomainError(fmt::format("probability {} at index {} is outside [0, 1]", p, i));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    throw InputDomainError(fmt::format("probabilities sum to {:.17g}, expected 1", total));
  }
}

TokenDistribution TokenDistribution::Uniform(std::size_t size) {
  if (size == 0) throw InputDomainError("distribution over an empty vocabulary");
  return TokenDistribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

TokenDistribution LanguageModel::NextDistribution(std::span<const TokenId> prefix) const {
  const Vocabulary& vocab = vocabulary();
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!vocab.Contains(prefix[i])) {
      throw InputDomainError(fmt::format("prefix position {} holds invalid token id {}", i,
                                         prefix[i]));
    }
  }
  return Predict(prefix);
}

// ---------------------------------------------------------------------------
// UniformModel

namespace {

Vocabulary NumberedVocabulary(std::size_t size) {
  if (size == 0) throw InputDomainError("uniform model needs at least one token");
  std::vector<std::string> tokens;
  tokens.reserve(size);
  for (std::size_t i = 0; i < size; ++i) tokens.push_back(fmt::format("t{}", i));
  return Vocabulary(std::move(tokens));
}

}  // namespace

UniformModel::UniformModel(std::size_t vocab_size) : vocab_(NumberedVocabulary(vocab_size)) {}

std::string UniformModel::Describe() const { return fmt::format("uniform(V={})", vocab_.size()); }

TokenDistribution UniformModel::Predict(std::span<const TokenId>) const {
  return TokenDistribution::Uniform(vocab_.size());
}

// ---------------------------------------------------------------------------
// NGramModel

NGramModel::NGramModel(Vocabulary vocab, int order, double alpha,
                       std::map<Context, SuccessorCounts> counts)
    : vocab_(std::move(vocab)), order_(order), alpha_(alpha), counts_(std::move(counts)) {
  if (order_ < 1) throw InputDomainError(fmt::format("n-gram order {} < 1", order_));
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw InputDomainError(fmt::format("smoothing alpha {} must be positive", alpha_));
  }
  if (vocab_.size() == 0) throw InputDomainError("n-gram model has an empty vocabulary");
  for (const auto& [context, successors] : counts_) {
    if (context.size() != static_cast<std::size_t>(order_ - 1)) {
      throw InputDomainError(fmt::format("context of length {} in an order-{} model",
                                         context.size(), order_));
    }
    std::uint64_t total = 0;
    for (TokenId id : context) {
      if (!vocab_.Contains(id)) throw InputDomainError(fmt::format("context id {} invalid", id));
    }
    for (const auto& [next, count] : successors) {
      if (!vocab_.Contains(next)) throw InputDomainError(fmt::format("successor id {} invalid", next));
      total += count;
    }
    totals_.emplace(context, total);
  }
}

std::string NGramModel::Describe() const {
  return fmt::format("ngram(order={}, alpha={}, V={}, contexts={})", order_, alpha_,
                     vocab_.size(), counts_.size());
}

const NGramModel::SuccessorCounts* NGramModel::FindContext(
    std::span<const TokenId> history) const {
  auto width = static_cast<std::size_t>(order_ - 1);
  if (history.size() < width) return nullptr;
  Context context(history.end() - static_cast<std::ptrdiff_t>(width), history.end());
  auto it = counts_.find(context);
  return it == counts_.end() ? nullptr : &it->second;
}

double NGramModel::Probability(std::span<const TokenId> history, TokenId next) const {
  if (!vocab_.Contains(next)) throw InputDomainError(fmt::format("token id {} invalid", next));
  return NextDistribution(history)[next];
}

TokenDistribution NGramModel::Predict(std::span<const TokenId> prefix) const {
  const double v = static_cast<double>(vocab_.size());
  const SuccessorCounts* successors = FindContext(prefix);
  if (successors == nullptr) return TokenDistribution::Uniform(vocab_.size());

  auto width = static_cast<std::size_t>(order_ - 1);
  Context context(prefix.end() - static_cast<std::ptrdiff_t>(width), prefix.end());
  const double denom = static_cast<double>(totals_.at(context)) + alpha_ * v;
  std::vector<double> probs(vocab_.size(), alpha_ / denom);
  for (const auto& [next, count] : *successors) {
    probs[static_cast<std::size_t>(next)] = (static_cast<double>(count) + alpha_) / denom;
  }
  return TokenDistribution(std::move(probs));
}

NGramModel TrainNGram(std::span<const std::string> corpus, int order, double alpha) {
  if (order < 1) throw InputDomainError(fmt::format("n-gram order {} < 1", order));
  if (!(alpha > 0.0)) throw InputDomainError(fmt::format("smoothing alpha {} must be positive", alpha));
  if (corpus.size() < static_cast<std::size_t>(order)) {
    throw InputDomainError(fmt::format("corpus of {} tokens is shorter than order {}",
                                       corpus.size(), order));
  }

  std::vector<std::string> tokens;
  std::unordered_map<std::string, TokenId> index;
  TokenSequence ids;
  ids.reserve(corpus.size());
  for (const auto& word : corpus) {
    auto [it, inserted] = index.emplace(word, static_cast<TokenId>(tokens.size()));
    if (inserted) tokens.push_back(word);
    ids.push_back(it->second);
  }
  std::optional<TokenId> eos;
  if (auto it = index.find(std::string(kEosToken)); it != index.end()) eos = it->second;

  std::map<NGramModel::Context, NGramModel::SuccessorCounts> counts;
  auto width = static_cast<std::size_t>(order - 1);
  for (std::size_t end = width; end < ids.size(); ++end) {
    NGramModel::Context context(ids.begin() + static_cast<std::ptrdiff_t>(end - width),
                                ids.begin() + static_cast<std::ptrdiff_t>(end));
    ++counts[context][ids[end]];
  }
  return NGramModel(Vocabulary(std::move(tokens), eos), order, alpha, std::move(counts));
}

// ---------------------------------------------------------------------------
// ScriptedModel

ScriptedModel::ScriptedModel(Vocabulary vocab, std::map<TokenSequence, TokenDistribution> table)
    : vocab_(std::move(vocab)),
      table_(std::move(table)),
      fallback_(TokenDistribution::Uniform(vocab_.size())) {
  for (const auto& [prefix, dist] : table_) {
    for (TokenId id : prefix) {
      if (!vocab_.Contains(id)) {
        throw InputDomainError(fmt::format("scripted prefix holds invalid token id {}", id));
      }
    }
    if (dist.size() != vocab_.size()) {
      throw InputDomainError(fmt::format("scripted distribution has {} entries, vocabulary {}",
                                         dist.size(), vocab_.size()));
    }
  }
}

std::string ScriptedModel::Describe() const {
  return fmt::format("scripted(V={}, prefixes={})", vocab_.size(), table_.size());
}

TokenDistribution ScriptedModel::Predict(std::span<const TokenId> prefix) const {
  auto it = table_.find(TokenSequence(prefix.begin(), prefix.end()));
  return it == table_.end() ? fallback_ : it->second;
}

}  // namespace treesearch
