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

#include "treesearch/engine.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "treesearch/errors.h"

namespace treesearch {
namespace {

// Runs fn(0..count-1) on up to `workers` threads. Returns the exception, if
// any, raised for each index.
template <typename Fn>
std::vector<std::exception_ptr> ParallelFor(std::size_t count, std::size_t workers, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      run(i);
      if (errors[i]) break;
    }
    return errors;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> threads;
    const std::size_t n = std::min(workers, count);
    threads.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      threads.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) run(i);
      });
    }
  }
  return errors;
}

std::string DescribeError(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

void SearchConfig::Validate() const {
  if (k < 1) throw InputDomainError("k must be >= 1");
  if (batch < 1) throw InputDomainError("batch must be >= 1");
  if (max_depth < 1) throw InputDomainError("max_depth must be >= 1");
  if (iterations < 1) throw InputDomainError("iterations must be >= 1");
  if (max_nodes < k + 1) {
    throw InputDomainError(fmt::format("max_nodes {} must be >= k + 1 = {}", max_nodes, k + 1));
  }
  if (top_n < 1) throw InputDomainError("top_n must be >= 1");
  if (hybrid_pool_factor < 1) throw InputDomainError("hybrid_pool_factor must be >= 1");
  if (workers < 1) throw InputDomainError("workers must be >= 1");
}

std::vector<NodeId> RankLeaves(const SearchTree& tree) {
  std::vector<NodeId> leaves = tree.Leaves();
  std::stable_sort(leaves.begin(), leaves.end(), [&](NodeId a, NodeId b) {
    double sa = tree.node(a).score.log_value();
    double sb = tree.node(b).score.log_value();
    if (sa != sb) return sa > sb;
    return a < b;
  });
  return leaves;
}

CompletionResult MakeResult(const SearchTree& tree, NodeId id) {
  const Node& n = tree.node(id);
  CompletionResult result;
  result.tokens = tree.PathTokens(id);
  result.text = tree.vocabulary().Render(result.tokens);
  result.score = n.score;
  result.terminal = n.status == NodeStatus::kTerminal;
  result.depth = n.depth;
  result.node = id;
  return result;
}

SearchOutcome RunSearch(const LanguageModel& model, std::span<const TokenId> prompt,
                        const SearchConfig& config) {
  config.Validate();
  const auto started = std::chrono::steady_clock::now();
  const Vocabulary& vocab = model.vocabulary();
  if (config.k > vocab.size()) {
    throw InputDomainError(fmt::format("k = {} exceeds vocabulary size {}", config.k, vocab.size()));
  }

  SearchOutcome outcome{SearchTree(vocab, TokenSequence(prompt.begin(), prompt.end())), {}, {}};
  SearchTree& tree = outcome.tree;
  SearchStats& stats = outcome.stats;
  Rng rng(config.seed);

  std::vector<ScoredLeaf> scored;
  bool out_of_nodes = false;
  while (stats.iterations_run < config.iterations && !out_of_nodes) {
    const std::vector<NodeId> open = tree.OpenLeaves();
    if (open.empty()) break;
    // Every extension adds exactly k nodes.
    const std::size_t room = (config.max_nodes - tree.size()) / config.k;
    if (room == 0) break;

    scored.clear();
    for (NodeId id : open) scored.push_back({id, tree.node(id).score});
    std::vector<NodeId> picked =
        SampleLeaves(config.sampler, scored, config.batch, rng, config.hybrid_pool_factor);
    if (picked.size() > room) {
      picked.resize(room);
      out_of_nodes = true;
    }
    ++stats.iterations_run;
    spdlog::debug("iteration {}: {} open leaves, extending {}", stats.iterations_run, open.size(),
                  picked.size());

    std::vector<TokenSequence> paths(picked.size());
    for (std::size_t i = 0; i < picked.size(); ++i) paths[i] = tree.PathTokens(picked[i]);
    std::vector<std::optional<TokenDistribution>> dists(picked.size());
    auto errors = ParallelFor(picked.size(), config.workers,
                              [&](std::size_t i) { dists[i] = model.NextDistribution(paths[i]); });
    for (std::size_t i = 0; i < picked.size(); ++i) {
      if (errors[i]) {
        throw ModelQueryError(fmt::format("model query failed at node {} (path \"{}\"): {}",
                                          picked[i].value, vocab.Render(paths[i]),
                                          DescribeError(errors[i])));
      }
    }

    for (std::size_t i = 0; i < picked.size(); ++i) {
      const NodeId parent = picked[i];
      std::vector<double> logprobs = tree.PathLogprobs(parent);
      TokenSequence& path = paths[i];
      for (const TokenChoice& choice : TopKTokens(*dists[i], config.k)) {
        const double lp = FlooredLog(choice.prob);
        logprobs.push_back(lp);
        path.push_back(choice.token);
        ConfidenceScore score = Score(config.scorer, logprobs);
        if (config.evaluator) score = ApplyEvaluator(score, config.evaluator, path);
        logprobs.pop_back();
        path.pop_back();

        const NodeId child = tree.AddChild(parent, choice.token, lp, score);
        const Node& node = tree.node(child);
        if (node.status == NodeStatus::kTerminal) {
          ++stats.terminals_found;
        } else if (node.depth >= config.max_depth) {
          tree.MarkNonViable(child);
        }
      }
      ++stats.leaves_extended;
    }
  }

  for (NodeId id : RankLeaves(tree)) {
    if (outcome.results.size() == config.top_n) break;
    outcome.results.push_back(MakeResult(tree, id));
  }
  stats.nodes_created = tree.size();
  stats.wall_time = std::chrono::steady_clock::now() - started;
  spdlog::info("search finished: {} nodes, {} iterations, {} leaves extended, {} terminals",
               stats.nodes_created, stats.iterations_run, stats.leaves_extended,
               stats.terminals_found);
  return outcome;
}

}  // namespace treesearch
