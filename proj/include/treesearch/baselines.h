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
#include <span>
#include <vector>

#include "treesearch/engine.h"
#include "treesearch/lm.h"

namespace treesearch {

// Appends the argmax token (ties to the lower id) until eos or max_len
// generated tokens. Scored by sum of log-probabilities.
CompletionResult GreedyDecode(const LanguageModel& model, std::span<const TokenId> prompt,
                              int max_len);

// Classic beam search over the full vocabulary. Each step keeps the `width`
// best extensions by sum of log-probabilities (ties to the lexicographically
// smaller sequence); extensions ending in eos retire to a finished pool.
// Returns the `width` best of finished and surviving beams, best first.
std::vector<CompletionResult> BeamSearch(const LanguageModel& model,
                                         std::span<const TokenId> prompt, std::size_t width,
                                         int max_len);

}  // namespace treesearch
