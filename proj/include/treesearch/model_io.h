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

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"

#include "treesearch/lm.h"

namespace treesearch {

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view contents);

// N-gram model file:
//   {"format": "treesearch-ngram", "version": 1, "order": n, "alpha": a,
//    "vocab": [strings], "eos": id|null,
//    "counts": [{"context": [ids], "next": [[id, count], ...]}, ...]}
// Contexts and successors appear in ascending id order, so identical models
// serialize to identical bytes.
nlohmann::json NGramModelToJson(const NGramModel& model);
NGramModel NGramModelFromJson(const nlohmann::json& doc);
void SaveNGramModel(const NGramModel& model, const std::filesystem::path& path);
NGramModel LoadNGramModel(const std::filesystem::path& path);

// Scripted model file:
//   {"vocab": [strings], "eos": token-string|null,
//    "table": {"<prefix tokens joined by single spaces>": [probs], ...}}
// The empty key is the empty prefix. Each array must be a valid distribution.
nlohmann::json ScriptedModelToJson(const ScriptedModel& model);
ScriptedModel ScriptedModelFromJson(const nlohmann::json& doc);
ScriptedModel LoadScriptedModel(const std::filesystem::path& path);

// Resolves "uniform:V", "ngram:PATH" or "scripted:PATH". A malformed
// descriptor raises InputDomainError; unreadable files raise IoError.
std::unique_ptr<LanguageModel> LoadModel(std::string_view descriptor);

}  // namespace treesearch
