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

#include "treesearch/tree.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "treesearch/errors.h"

namespace treesearch {

std::string_view ToString(NodeStatus status) {
  switch (status) {
    case NodeStatus::kOpenLeaf: return "open";
    case NodeStatus::kExpanded: return "expanded";
    case NodeStatus::kTerminal: return "terminal";
    case NodeStatus::kNonViable: return "non-viable";
  }
  return "unknown";
}

std::optional<NodeStatus> ParseNodeStatus(std::string_view name) {
  if (name == "open") return NodeStatus::kOpenLeaf;
  if (name == "expanded") return NodeStatus::kExpanded;
  if (name == "terminal") return NodeStatus::kTerminal;
  if (name == "non-viable") return NodeStatus::kNonViable;
  return std::nullopt;
}

SearchTree::SearchTree(Vocabulary vocab, TokenSequence prompt)
    : vocab_(std::move(vocab)), prompt_(std::move(prompt)) {
  for (TokenId id : prompt_) {
    if (!vocab_.Contains(id)) throw InputDomainError(fmt::format("prompt token id {} invalid", id));
  }
  nodes_.emplace_back();
}

SearchTree SearchTree::FromNodes(Vocabulary vocab, TokenSequence prompt,
                                 std::vector<Node> nodes) {
  SearchTree tree(std::move(vocab), std::move(prompt));
  tree.nodes_ = std::move(nodes);
  auto problems = tree.Audit();
  if (!problems.empty()) {
    throw InputDomainError(fmt::format("invalid tree: {}", fmt::join(problems, "; ")));
  }
  return tree;
}

const Node& SearchTree::node(NodeId id) const {
  if (!Contains(id)) {
    throw HandleError(fmt::format("node {} not in tree of size {}", id.value, nodes_.size()));
  }
  return nodes_[id.value];
}

Node& SearchTree::mutable_node(NodeId id) {
  if (!Contains(id)) {
    throw HandleError(fmt::format("node {} not in tree of size {}", id.value, nodes_.size()));
  }
  return nodes_[id.value];
}

NodeId SearchTree::AddChild(NodeId parent, TokenId token, double token_logprob,
                            ConfidenceScore score) {
  Node& p = mutable_node(parent);
  if (p.status != NodeStatus::kOpenLeaf && p.status != NodeStatus::kExpanded) {
    throw LifecycleError(fmt::format("cannot extend {} node {}", ToString(p.status), parent.value));
  }
  if (!vocab_.Contains(token)) throw InputDomainError(fmt::format("token id {} invalid", token));
  if (std::isnan(token_logprob) || token_logprob > 0.0) {
    throw InputDomainError(fmt::format("token log-probability {} must be <= 0", token_logprob));
  }

  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  Node child;
  child.token = token;
  child.parent = parent;
  child.token_logprob = token_logprob;
  child.depth = p.depth + 1;
  child.status = vocab_.IsEos(token) ? NodeStatus::kTerminal : NodeStatus::kOpenLeaf;
  child.score = score;

  p.status = NodeStatus::kExpanded;
  p.children.push_back(id);
  nodes_.push_back(std::move(child));
  return id;
}

void SearchTree::MarkNonViable(NodeId id) {
  Node& n = mutable_node(id);
  if (n.status != NodeStatus::kOpenLeaf) {
    throw LifecycleError(fmt::format("node {} is {}, only open leaves can become non-viable",
                                     id.value, ToString(n.status)));
  }
  n.status = NodeStatus::kNonViable;
}

TokenSequence SearchTree::CompletionTokens(NodeId id) const {
  TokenSequence reversed;
  for (const Node* n = &node(id); n->parent; n = &nodes_[n->parent->value]) {
    reversed.push_back(*n->token);
  }
  return {reversed.rbegin(), reversed.rend()};
}

TokenSequence SearchTree::PathTokens(NodeId id) const {
  TokenSequence tokens = prompt_;
  TokenSequence completion = CompletionTokens(id);
  tokens.insert(tokens.end(), completion.begin(), completion.end());
  return tokens;
}

std::vector<double> SearchTree::PathLogprobs(NodeId id) const {
  std::vector<double> reversed;
  for (const Node* n = &node(id); n->parent; n = &nodes_[n->parent->value]) {
    reversed.push_back(n->token_logprob);
  }
  return {reversed.rbegin(), reversed.rend()};
}

std::vector<NodeId> SearchTree::OpenLeaves() const {
  std::vector<NodeId> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].status == NodeStatus::kOpenLeaf) out.push_back(NodeId{i});
  }
  return out;
}

std::vector<NodeId> SearchTree::Leaves() const {
  std::vector<NodeId> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].status != NodeStatus::kExpanded) out.push_back(NodeId{i});
  }
  return out;
}

std::vector<std::string> SearchTree::Audit() const {
  std::vector<std::string> problems;
  if (nodes_.empty()) {
    problems.emplace_back("tree has no root");
    return problems;
  }
  std::size_t links = 0;
  std::size_t roots = 0;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    links += n.children.size();
    if (!n.parent) {
      ++roots;
      if (i != 0) problems.push_back(fmt::format("node {} has no parent", i));
      if (n.depth != 0) problems.push_back("root depth is not 0");
      if (n.token) problems.push_back("root carries a token");
      continue;
    }
    if (n.parent->value >= i) {
      problems.push_back(fmt::format("node {} has parent {} that does not precede it", i,
                                     n.parent->value));
      continue;
    }
    const Node& p = nodes_[n.parent->value];
    if (std::count(p.children.begin(), p.children.end(), NodeId{i}) != 1) {
      problems.push_back(fmt::format("node {} missing from its parent's children", i));
    }
    if (n.depth != p.depth + 1) problems.push_back(fmt::format("node {} depth mismatch", i));
    if (!n.token || !vocab_.Contains(*n.token)) {
      problems.push_back(fmt::format("node {} has an invalid token", i));
    }
    if (!(n.token_logprob <= 0.0)) problems.push_back(fmt::format("node {} logprob > 0", i));
    // Recompute depth by walking to the root.
    int walked = 0;
    for (const Node* a = &n; a->parent && walked <= static_cast<int>(nodes_.size());
         a = &nodes_[a->parent->value]) {
      ++walked;
    }
    if (walked != n.depth) problems.push_back(fmt::format("node {} walked depth {} != {}", i, walked, n.depth));
  }
  if (roots != 1) problems.push_back(fmt::format("{} parentless nodes", roots));
  if (links + 1 != nodes_.size()) {
    problems.push_back(fmt::format("{} child links for {} nodes", links, nodes_.size()));
  }
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const bool has_children = !n.children.empty();
    if (has_children != (n.status == NodeStatus::kExpanded)) {
      problems.push_back(fmt::format("node {} is {} with {} children", i, ToString(n.status),
                                     n.children.size()));
    }
    for (NodeId c : n.children) {
      if (!Contains(c) || nodes_[c.value].parent != NodeId{i}) {
        problems.push_back(fmt::format("node {} lists child {} that does not point back", i, c.value));
      }
    }
  }
  return problems;
}

}  // namespace treesearch
