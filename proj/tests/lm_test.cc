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
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gtest/gtest.h"
#include "support/oracles.h"
#include "treesearch/errors.h"

namespace treesearch {
namespace {

std::vector<std::string> Words(const char* text) { return SplitWhitespace(text); }

void ExpectValidDistribution(const TokenDistribution& dist) {
  double total = 0.0;
  for (double p : dist.probs()) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(VocabularyTest, RejectsDuplicateAndEmptyTokens) {
  EXPECT_THROW(Vocabulary({"a", "a"}), InputDomainError);
  EXPECT_THROW(Vocabulary({"a", ""}), InputDomainError);
  EXPECT_THROW(Vocabulary({"a"}, TokenId{1}), InputDomainError);
}

TEST(VocabularyTest, TokenizeRejectsUnknownTokens) {
  Vocabulary vocab({"a", "b"});
  EXPECT_EQ(vocab.Tokenize("  b a\tb\n"), (TokenSequence{1, 0, 1}));
  EXPECT_TRUE(vocab.Tokenize("").empty());
  EXPECT_THROW(vocab.Tokenize("a c"), InputDomainError);
  EXPECT_EQ(vocab.Render(TokenSequence{1, 0}), "b a");
}

TEST(TokenDistributionTest, ValidatesMassAndRange) {
  EXPECT_NO_THROW(TokenDistribution({0.7, 0.3}));
  EXPECT_THROW(TokenDistribution({0.7, 0.2}), InputDomainError);
  EXPECT_THROW(TokenDistribution({1.2, -0.2}), InputDomainError);
  EXPECT_THROW(TokenDistribution({std::nan(""), 1.0}), InputDomainError);
  EXPECT_THROW(TokenDistribution({}), InputDomainError);
}

TEST(UniformModelTest, QuarterEach) {
  UniformModel model(4);
  for (TokenSequence prefix : {TokenSequence{}, TokenSequence{3, 1, 2}}) {
    auto dist = model.NextDistribution(prefix);
    EXPECT_EQ(std::vector<double>(dist.probs().begin(), dist.probs().end()),
              (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
  }
}

TEST(LanguageModelTest, InvalidPrefixIdIsInputDomainError) {
  UniformModel model(4);
  EXPECT_THROW(model.NextDistribution(TokenSequence{4}), InputDomainError);
  EXPECT_THROW(model.NextDistribution(TokenSequence{-1}), InputDomainError);
}

TEST(ScriptedModelTest, TableLookupAndUniformFallback) {
  ScriptedModel model(Vocabulary({"x", "y"}), {{TokenSequence{}, TokenDistribution({0.7, 0.3})}});
  EXPECT_EQ(model.NextDistribution(TokenSequence{})[0], 0.7);
  EXPECT_EQ(model.NextDistribution(TokenSequence{})[1], 0.3);
  EXPECT_EQ(model.NextDistribution(TokenSequence{1})[0], 0.5);
}

TEST(ScriptedModelTest, RejectsMismatchedDistributionSize) {
  EXPECT_THROW(ScriptedModel(Vocabulary({"x", "y", "z"}),
                             {{TokenSequence{}, TokenDistribution({0.7, 0.3})}}),
               InputDomainError);
}

TEST(NGramModelTest, BigramWithAddOneSmoothing) {
  const auto corpus = Words("a b a b a");
  NGramModel model = TrainNGram(corpus, 2, 1.0);
  ASSERT_EQ(model.vocabulary().tokens(), (std::vector<std::string>{"a", "b"}));
  const TokenId a = 0, b = 1;
  EXPECT_DOUBLE_EQ(model.Probability(TokenSequence{a}, b), 0.75);
  EXPECT_DOUBLE_EQ(model.Probability(TokenSequence{a}, a), 0.25);
  // Same values from the naive string-counting oracle.
  EXPECT_DOUBLE_EQ(testing::NaiveNGramProbability(corpus, 2, 1.0, {"a"}, "b"), 0.75);
  EXPECT_DOUBLE_EQ(testing::NaiveNGramProbability(corpus, 2, 1.0, {"a"}, "a"), 0.25);
}

TEST(NGramModelTest, SingleTokenVocabularyForcesProbabilityOne) {
  NGramModel unigram = TrainNGram(Words("x"), 1, 0.5);
  EXPECT_DOUBLE_EQ(unigram.NextDistribution(TokenSequence{})[0], 1.0);
  NGramModel bigram = TrainNGram(Words("a a a"), 2, 1.0);
  EXPECT_DOUBLE_EQ(bigram.Probability(TokenSequence{0}, 0), 1.0);
}

TEST(NGramModelTest, TrainingPreconditions) {
  EXPECT_THROW(TrainNGram(Words("a"), 2, 1.0), InputDomainError);
  EXPECT_THROW(TrainNGram(Words("a b"), 2, 0.0), InputDomainError);
  EXPECT_THROW(TrainNGram(Words("a b"), 2, -1.0), InputDomainError);
  EXPECT_THROW(TrainNGram(Words("a b"), 0, 1.0), InputDomainError);
}

TEST(NGramModelTest, UnseenAndShortContextsAreUniform) {
  NGramModel model = TrainNGram(Words("a b c a b"), 3, 0.5);
  // "c b" never occurs.
  auto dist = model.NextDistribution(TokenSequence{2, 1});
  for (double p : dist.probs()) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
  auto root = model.NextDistribution(TokenSequence{0});
  for (double p : root.probs()) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
}

TEST(NGramModelTest, EosTokenIsDetected) {
  NGramModel model = TrainNGram(Words("a b </s> a </s>"), 2, 1.0);
  ASSERT_TRUE(model.vocabulary().eos_id().has_value());
  EXPECT_EQ(model.vocabulary().token(*model.vocabulary().eos_id()), "</s>");
}

// For seen contexts the probability is exactly (c + alpha) / (C + alpha V).
TEST(NGramModelTest, MatchesNaiveCountingOnRandomCorpora) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> alphabet = {"p", "q", "r", "s"};
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::vector<std::string> corpus;
    for (int i = 0; i < 40; ++i) corpus.push_back(alphabet[pick(rng)]);
    const int order = 1 + trial % 3;
    const double alpha = 0.1 + 0.3 * (trial % 4);
    NGramModel model = TrainNGram(corpus, order, alpha);
    const Vocabulary& vocab = model.vocabulary();
    for (int probe = 0; probe < 10; ++probe) {
      std::vector<std::string> context;
      TokenSequence ids;
      for (int j = 0; j < order - 1; ++j) {
        // Only corpus tokens are in the vocabulary.
        std::uniform_int_distribution<std::size_t> position(0, corpus.size() - 1);
        context.push_back(corpus[position(rng)]);
        ids.push_back(*vocab.Find(context.back()));
      }
      auto dist = model.NextDistribution(ids);
      ExpectValidDistribution(dist);
      for (TokenId t = 0; t < static_cast<TokenId>(vocab.size()); ++t) {
        EXPECT_NEAR(dist[t],
                    testing::NaiveNGramProbability(corpus, order, alpha, context, vocab.token(t)),
                    1e-15);
      }
    }
  }
}

TEST(LanguageModelTest, PureAndThreadSafe) {
  NGramModel model = TrainNGram(Words("the cat sat on the mat and the cat ran"), 2, 0.3);
  const TokenSequence prefix = model.vocabulary().Tokenize("the cat");
  const TokenDistribution expected = model.NextDistribution(prefix);
  std::vector<std::jthread> threads;
  std::vector<int> mismatches(8, 0);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 500; ++i) {
        if (!(model.NextDistribution(prefix) == expected)) ++mismatches[static_cast<std::size_t>(t)];
      }
    });
  }
  threads.clear();
  for (int m : mismatches) EXPECT_EQ(m, 0);
}

}  // namespace
}  // namespace treesearch
