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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treesearch/lm.h"
#include "treesearch/scoring.h"

namespace treesearch {

// Dense index into a SearchTree's node arena. Never reused.
struct NodeId {
  std::uint32_t value = 0;

  friend auto operator<=>(NodeId, NodeId) = default;
};

// open-leaf -> {expanded, terminal, non-viable}; the last three are final.
enum class NodeStatus { kOpenLeaf, kExpanded, kTerminal, kNonViable };

std::string_view ToString(NodeStatus status);
std::optional<NodeStatus> ParseNodeStatus(std::string_view name);

struct Node {
  std::optional<TokenId> token;    // absent for the root
  std::optional<NodeId> parent;    // absent for the root
  std::vector<NodeId> children;    // insertion order
  double token_logprob = 0.0;      // ln P(token | path), 0 for the root
  int depth = 0;                   // generated tokens from the root
  NodeStatus status = NodeStatus::kOpenLeaf;
  ConfidenceScore score;           // fixed at creation

  friend bool operator==(const Node&, const Node&) = default;
};

// Arena of partial completions grown from a prompt. The prompt lives on the
// tree; the root node itself carries no token.
//
// Const member functions may run concurrently with each other; mutation
// needs exclusive access.
class SearchTree {
 public:
  SearchTree(Vocabulary vocab, TokenSequence prompt);

  // Adopts a prebuilt arena (children lists included). Throws
  // InputDomainError listing every Audit() failure.
  static SearchTree FromNodes(Vocabulary vocab, TokenSequence prompt, std::vector<Node> nodes);

  NodeId root() const { return NodeId{0}; }
  std::size_t size() const { return nodes_.size(); }
  const TokenSequence& prompt() const { return prompt_; }
  const Vocabulary& vocabulary() const { return vocab_; }

  bool Contains(NodeId id) const { return id.value < nodes_.size(); }
  // Throws HandleError for ids not in this tree.
  const Node& node(NodeId id) const;

  // Appends a child of `parent`. The child is terminal when `token` is the
  // vocabulary's eos token and an open leaf otherwise; the parent becomes
  // expanded.
  NodeId AddChild(NodeId parent, TokenId token, double token_logprob,
                  ConfidenceScore score = {});

  void MarkNonViable(NodeId id);

  // Prompt followed by the tokens on the root -> id path.
  TokenSequence PathTokens(NodeId id) const;
  // Generated tokens only (no prompt).
  TokenSequence CompletionTokens(NodeId id) const;
  // Per-token log-probabilities along the root -> id path.
  std::vector<double> PathLogprobs(NodeId id) const;

  // Nodes with status open-leaf, in id order.
  std::vector<NodeId> OpenLeaves() const;
  // Nodes with no children that are not open, plus open leaves: everything
  // that can be reported as a completion.
  std::vector<NodeId> Leaves() const;

  // Full structural audit; returns one message per broken invariant.
  std::vector<std::string> Audit() const;

  friend bool operator==(const SearchTree&, const SearchTree&) = default;

 private:
  Node& mutable_node(NodeId id);

  Vocabulary vocab_;
  TokenSequence prompt_;
  std::vector<Node> nodes_;
};

}  // namespace treesearch
