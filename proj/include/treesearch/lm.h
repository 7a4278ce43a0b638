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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace treesearch {

using TokenId = std::int32_t;
using TokenSequence = std::vector<TokenId>;

// Token that marks end-of-sequence when it occurs in an n-gram corpus.
inline constexpr std::string_view kEosToken = "</s>";

// Maximum deviation of a distribution's total mass from 1.
inline constexpr double kDistributionTolerance = 1e-9;

// Splits UTF-8 text on ASCII whitespace. Empty input yields no tokens.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Ordered token inventory; a token's id is its position.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens,
                      std::optional<TokenId> eos_id = std::nullopt);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<TokenId> eos_id() const { return eos_id_; }

  bool Contains(TokenId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < tokens_.size();
  }
  bool IsEos(TokenId id) const { return eos_id_ && *eos_id_ == id; }

  const std::string& token(TokenId id) const;
  std::optional<TokenId> Find(std::string_view token) const;

  // Whitespace tokenization; unknown tokens raise InputDomainError.
  TokenSequence Tokenize(std::string_view text) const;
  // Joins token strings with single spaces.
  std::string Render(std::span<const TokenId> ids) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.eos_id_ == b.eos_id_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::optional<TokenId> eos_id_;
};

// Next-token probabilities over a vocabulary. Construction validates that
// every entry is a finite value in [0, 1] and that the total is 1 within
// kDistributionTolerance.
class TokenDistribution {
 public:
  explicit TokenDistribution(std::vector<double> probs);
  static TokenDistribution Uniform(std::size_t size);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](TokenId id) const { return probs_[static_cast<std::size_t>(id)]; }

  friend bool operator==(const TokenDistribution&, const TokenDistribution&) = default;

 private:
  std::vector<double> probs_;
};

// A pure next-token predictor. Implementations are immutable after
// construction and NextDistribution may be called from several threads.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  // Short human-readable descriptor, echoed into run manifests.
  virtual std::string Describe() const = 0;

  // Throws InputDomainError when `prefix` holds an id outside the vocabulary.
  TokenDistribution NextDistribution(std::span<const TokenId> prefix) const;

 protected:
  virtual TokenDistribution Predict(std::span<const TokenId> prefix) const = 0;
};

// Same probability for every token. Tokens are named "t0", "t1", ...
class UniformModel final : public LanguageModel {
 public:
  explicit UniformModel(std::size_t vocab_size);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::string Describe() const override;

 protected:
  TokenDistribution Predict(std::span<const TokenId> prefix) const override;

 private:
  Vocabulary vocab_;
};

// Add-alpha smoothed n-gram model. Contexts never seen in training (and
// prefixes shorter than order-1) get the uniform distribution.
class NGramModel final : public LanguageModel {
 public:
  using Context = std::vector<TokenId>;
  using SuccessorCounts = std::map<TokenId, std::uint64_t>;

  NGramModel(Vocabulary vocab, int order, double alpha,
             std::map<Context, SuccessorCounts> counts);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::string Describe() const override;

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  const std::map<Context, SuccessorCounts>& counts() const { return counts_; }

  // P(next | last order-1 tokens of `history`).
  double Probability(std::span<const TokenId> history, TokenId next) const;

 protected:
  TokenDistribution Predict(std::span<const TokenId> prefix) const override;

 private:
  const SuccessorCounts* FindContext(std::span<const TokenId> history) const;

  Vocabulary vocab_;
  int order_;
  double alpha_;
  std::map<Context, SuccessorCounts> counts_;
  std::map<Context, std::uint64_t> totals_;
};

// Counts every sliding window of `order` tokens. The vocabulary is the set of
// distinct corpus tokens in first-appearance order; "</s>" becomes the eos
// token when present.
NGramModel TrainNGram(std::span<const std::string> corpus, int order, double alpha);

// Exact prefix lookup table; prefixes absent from the table get the uniform
// distribution. Keys are full token sequences, prompt included.
class ScriptedModel final : public LanguageModel {
 public:
  ScriptedModel(Vocabulary vocab, std::map<TokenSequence, TokenDistribution> table);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::string Describe() const override;
  const std::map<TokenSequence, TokenDistribution>& table() const { return table_; }

 protected:
  TokenDistribution Predict(std::span<const TokenId> prefix) const override;

 private:
  Vocabulary vocab_;
  std::map<TokenSequence, TokenDistribution> table_;
  TokenDistribution fallback_;
};

}  // namespace treesearch
