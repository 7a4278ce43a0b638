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

#include "treesearch/tree_io.h"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "treesearch/errors.h"

namespace treesearch {

using nlohmann::json;

namespace {

std::string Pointer(std::string_view base, std::size_t index, std::string_view field) {
  return fmt::format("{}/{}/{}", base, index, field);
}

const json& Field(const json& object, std::string_view key, const std::string& where) {
  if (!object.is_object()) throw ParseError(where, "expected an object");
  auto it = object.find(std::string(key));
  if (it == object.end()) throw ParseError(where + "/" + std::string(key), "missing field");
  return *it;
}

std::int64_t Integer(const json& value, const std::string& where) {
  if (!value.is_number_integer()) throw ParseError(where, "expected an integer");
  return value.get<std::int64_t>();
}

double Number(const json& value, const std::string& where) {
  if (!value.is_number()) throw ParseError(where, "expected a number");
  return value.get<double>();
}

std::string DotEscape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

json TreeToJson(const SearchTree& tree) {
  json nodes = json::array();
  for (std::uint32_t i = 0; i < tree.size(); ++i) {
    const Node& n = tree.node(NodeId{i});
    nodes.push_back({
        {"id", i},
        {"parent", n.parent ? json(n.parent->value) : json(nullptr)},
        {"token", n.token ? json(*n.token) : json(nullptr)},
        {"logprob", n.token_logprob},
        {"depth", n.depth},
        {"status", ToString(n.status)},
        {"score", n.score.log_value()},
    });
  }
  const Vocabulary& vocab = tree.vocabulary();
  return {
      {"prompt", tree.prompt()},
      {"vocab", vocab.tokens()},
      {"eos", vocab.eos_id() ? json(*vocab.eos_id()) : json(nullptr)},
      {"nodes", std::move(nodes)},
  };
}

SearchTree TreeFromJson(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "tree document must be an object");

  const json& vocab_json = Field(doc, "vocab", "");
  if (!vocab_json.is_array()) throw ParseError("/vocab", "expected an array");
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < vocab_json.size(); ++i) {
    if (!vocab_json[i].is_string()) throw ParseError(fmt::format("/vocab/{}", i), "expected a string");
    tokens.push_back(vocab_json[i].get<std::string>());
  }
  std::optional<TokenId> eos;
  if (auto it = doc.find("eos"); it != doc.end() && !it->is_null()) {
    eos = static_cast<TokenId>(Integer(*it, "/eos"));
  }
  std::optional<Vocabulary> vocab;
  try {
    vocab.emplace(std::move(tokens), eos);
  } catch (const InputDomainError& e) {
    throw ParseError("/vocab", e.what());
  }

  const json& prompt_json = Field(doc, "prompt", "");
  if (!prompt_json.is_array()) throw ParseError("/prompt", "expected an array");
  TokenSequence prompt;
  for (std::size_t i = 0; i < prompt_json.size(); ++i) {
    auto id = Integer(prompt_json[i], fmt::format("/prompt/{}", i));
    if (!vocab->Contains(static_cast<TokenId>(id))) {
      throw ParseError(fmt::format("/prompt/{}", i), "token id outside vocabulary");
    }
    prompt.push_back(static_cast<TokenId>(id));
  }

  const json& nodes_json = Field(doc, "nodes", "");
  if (!nodes_json.is_array() || nodes_json.empty()) {
    throw ParseError("/nodes", "expected a non-empty array");
  }
  const std::size_t count = nodes_json.size();
  std::vector<Node> nodes(count);
  std::vector<bool> seen(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    const json& item = nodes_json[i];
    const std::string where = fmt::format("/nodes/{}", i);
    auto id = Integer(Field(item, "id", where), Pointer("/nodes", i, "id"));
    if (id < 0 || static_cast<std::size_t>(id) >= count) {
      throw ParseError(Pointer("/nodes", i, "id"), "id outside the dense range");
    }
    if (seen[static_cast<std::size_t>(id)]) throw ParseError(Pointer("/nodes", i, "id"), "duplicate id");
    seen[static_cast<std::size_t>(id)] = true;
    Node& n = nodes[static_cast<std::size_t>(id)];

    const json& parent = Field(item, "parent", where);
    if (!parent.is_null()) {
      auto p = Integer(parent, Pointer("/nodes", i, "parent"));
      if (p < 0 || static_cast<std::size_t>(p) >= count) {
        throw ParseError(Pointer("/nodes", i, "parent"), "unknown parent id");
      }
      n.parent = NodeId{static_cast<std::uint32_t>(p)};
    }
    const json& token = Field(item, "token", where);
    if (!token.is_null()) {
      auto t = Integer(token, Pointer("/nodes", i, "token"));
      if (!vocab->Contains(static_cast<TokenId>(t))) {
        throw ParseError(Pointer("/nodes", i, "token"), "token id outside vocabulary");
      }
      n.token = static_cast<TokenId>(t);
    }
    n.token_logprob = Number(Field(item, "logprob", where), Pointer("/nodes", i, "logprob"));
    n.depth = static_cast<int>(Integer(Field(item, "depth", where), Pointer("/nodes", i, "depth")));
    const json& status = Field(item, "status", where);
    auto parsed = status.is_string() ? ParseNodeStatus(status.get<std::string>()) : std::nullopt;
    if (!parsed) throw ParseError(Pointer("/nodes", i, "status"), "unknown status");
    n.status = *parsed;
    const std::string score_where = Pointer("/nodes", i, "score");
    try {
      n.score = ConfidenceScore::FromLog(Number(Field(item, "score", where), score_where));
    } catch (const InputDomainError& e) {
      throw ParseError(score_where, e.what());
    }
  }

  // Reject cycles before anything walks parent links.
  std::vector<int> state(count, 0);  // 0 unvisited, 1 on current walk, 2 reaches root
  for (std::size_t start = 0; start < count; ++start) {
    std::vector<std::size_t> walk;
    std::size_t cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      walk.push_back(cur);
      if (!nodes[cur].parent) break;
      cur = nodes[cur].parent->value;
    }
    if (state[cur] == 1 && nodes[cur].parent) {
      throw ParseError(fmt::format("/nodes/{}/parent", cur), "parent links form a cycle");
    }
    for (std::size_t w : walk) state[w] = 2;
  }

  for (std::uint32_t i = 0; i < count; ++i) {
    if (nodes[i].parent) {
      if (nodes[i].parent->value >= i) {
        throw ParseError(fmt::format("/nodes/{}/parent", i), "parent must precede its child");
      }
      nodes[nodes[i].parent->value].children.push_back(NodeId{i});
    }
  }

  try {
    return SearchTree::FromNodes(std::move(*vocab), std::move(prompt), std::move(nodes));
  } catch (const InputDomainError& e) {
    throw ParseError("/nodes", e.what());
  }
}

std::string SerializeTree(const SearchTree& tree) { return TreeToJson(tree).dump(); }

SearchTree DeserializeTree(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("byte {}", e.byte), e.what());
  }
  return TreeFromJson(doc);
}

std::string TreeToDot(const SearchTree& tree) {
  const Vocabulary& vocab = tree.vocabulary();
  std::string out = "digraph search_tree {\n  node [shape=box];\n";
  for (std::uint32_t i = 0; i < tree.size(); ++i) {
    const Node& n = tree.node(NodeId{i});
    std::string token = n.token ? vocab.token(*n.token) : std::string("<root>");
    out += fmt::format("  n{} [label=\"{}\\n{:.6g}\"", i, DotEscape(token), n.score.linear());
    if (n.status == NodeStatus::kNonViable) out += ", style=dashed";
    if (n.status == NodeStatus::kTerminal) out += ", peripheries=2";
    out += "];\n";
  }
  for (std::uint32_t i = 0; i < tree.size(); ++i) {
    for (NodeId c : tree.node(NodeId{i}).children) out += fmt::format("  n{} -> n{};\n", i, c.value);
  }
  out += "}\n";
  return out;
}

}  // namespace treesearch
