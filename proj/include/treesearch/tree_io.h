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

#include <string>
#include <string_view>

#include "json.hpp"

#include "treesearch/tree.h"

namespace treesearch {

// Tree document:
//   {"prompt": [ids], "vocab": [strings], "eos": id|null,
//    "nodes": [{"id", "parent", "token", "logprob", "depth", "status", "score"}]}
// "score" is the node's log confidence. Nodes are listed in id order.
nlohmann::json TreeToJson(const SearchTree& tree);

// Rebuilds a tree, enforcing every tree invariant. Problems raise ParseError
// whose location is a JSON pointer into the document.
SearchTree TreeFromJson(const nlohmann::json& doc);

// Compact, deterministic text form of TreeToJson.
std::string SerializeTree(const SearchTree& tree);
// Parses text produced by SerializeTree. Syntax errors report a byte offset.
SearchTree DeserializeTree(std::string_view text);

// Graphviz rendering: one vertex per node labelled "token\nscore", edges from
// parent to child, non-viable nodes dashed and terminal nodes double-bordered.
std::string TreeToDot(const SearchTree& tree);

}  // namespace treesearch
