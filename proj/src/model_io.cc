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

#include "treesearch/model_io.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "treesearch/errors.h"

namespace treesearch {

using nlohmann::json;

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error while reading '{}'", path.string()));
  return buffer.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(fmt::format("error while writing '{}'", path.string()));
}

namespace {

json ParseDocument(const std::string& text, const std::filesystem::path& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: byte {}", path.string(), e.byte), e.what());
  }
}

const json& Require(const json& doc, const char* key) {
  if (!doc.is_object()) throw ParseError("", "expected a JSON object");
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(fmt::format("/{}", key), "missing field");
  return *it;
}

std::vector<std::string> ReadVocab(const json& doc) {
  const json& vocab = Require(doc, "vocab");
  if (!vocab.is_array()) throw ParseError("/vocab", "expected an array of strings");
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (!vocab[i].is_string()) throw ParseError(fmt::format("/vocab/{}", i), "expected a string");
    tokens.push_back(vocab[i].get<std::string>());
  }
  return tokens;
}

std::string JoinPrefix(const Vocabulary& vocab, const TokenSequence& prefix) {
  return vocab.Render(prefix);
}

}  // namespace

json NGramModelToJson(const NGramModel& model) {
  json counts = json::array();
  for (const auto& [context, successors] : model.counts()) {
    json next = json::array();
    for (const auto& [token, count] : successors) next.push_back({token, count});
    counts.push_back({{"context", context}, {"next", std::move(next)}});
  }
  const Vocabulary& vocab = model.vocabulary();
  return {
      {"format", "treesearch-ngram"},
      {"version", 1},
      {"order", model.order()},
      {"alpha", model.alpha()},
      {"vocab", vocab.tokens()},
      {"eos", vocab.eos_id() ? json(*vocab.eos_id()) : json(nullptr)},
      {"counts", std::move(counts)},
  };
}

NGramModel NGramModelFromJson(const json& doc) {
  const json& format = Require(doc, "format");
  if (format != "treesearch-ngram") throw ParseError("/format", "not a treesearch n-gram model");
  const json& order = Require(doc, "order");
  if (!order.is_number_integer()) throw ParseError("/order", "expected an integer");
  const json& alpha = Require(doc, "alpha");
  if (!alpha.is_number()) throw ParseError("/alpha", "expected a number");
  std::optional<TokenId> eos;
  if (auto it = doc.find("eos"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ParseError("/eos", "expected an integer or null");
    eos = it->get<TokenId>();
  }

  std::map<NGramModel::Context, NGramModel::SuccessorCounts> counts;
  const json& entries = Require(doc, "counts");
  if (!entries.is_array()) throw ParseError("/counts", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = fmt::format("/counts/{}", i);
    try {
      auto context = entries[i].at("context").get<NGramModel::Context>();
      auto& successors = counts[context];
      for (const auto& pair : entries[i].at("next")) {
        successors[pair.at(0).get<TokenId>()] = pair.at(1).get<std::uint64_t>();
      }
    } catch (const json::exception& e) {
      throw ParseError(where, e.what());
    }
  }
  try {
    return NGramModel(Vocabulary(ReadVocab(doc), eos), order.get<int>(), alpha.get<double>(),
                      std::move(counts));
  } catch (const InputDomainError& e) {
    throw ParseError("", e.what());
  }
}

void SaveNGramModel(const NGramModel& model, const std::filesystem::path& path) {
  WriteTextFile(path, NGramModelToJson(model).dump(2) + "\n");
}

NGramModel LoadNGramModel(const std::filesystem::path& path) {
  return NGramModelFromJson(ParseDocument(ReadTextFile(path), path));
}

json ScriptedModelToJson(const ScriptedModel& model) {
  const Vocabulary& vocab = model.vocabulary();
  json table = json::object();
  for (const auto& [prefix, dist] : model.table()) {
    table[JoinPrefix(vocab, prefix)] = std::vector<double>(dist.probs().begin(), dist.probs().end());
  }
  return {
      {"vocab", vocab.tokens()},
      {"eos", vocab.eos_id() ? json(vocab.token(*vocab.eos_id())) : json(nullptr)},
      {"table", std::move(table)},
  };
}

ScriptedModel ScriptedModelFromJson(const json& doc) {
  std::vector<std::string> tokens = ReadVocab(doc);
  std::optional<TokenId> eos;
  if (auto it = doc.find("eos"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError("/eos", "expected a token string or null");
    auto pos = std::find(tokens.begin(), tokens.end(), it->get<std::string>());
    if (pos == tokens.end()) throw ParseError("/eos", "eos token not in vocabulary");
    eos = static_cast<TokenId>(pos - tokens.begin());
  }
  std::optional<Vocabulary> vocab;
  try {
    vocab.emplace(std::move(tokens), eos);
  } catch (const InputDomainError& e) {
    throw ParseError("/vocab", e.what());
  }

  const json& table_json = Require(doc, "table");
  if (!table_json.is_object()) throw ParseError("/table", "expected an object");
  std::map<TokenSequence, TokenDistribution> table;
  for (const auto& [key, value] : table_json.items()) {
    const std::string where = "/table/" + key;
    TokenSequence prefix;
    std::vector<double> probs;
    try {
      prefix = vocab->Tokenize(key);
      if (!value.is_array()) throw ParseError(where, "expected an array of probabilities");
      for (const auto& p : value) {
        if (!p.is_number()) throw ParseError(where, "expected numbers");
        probs.push_back(p.get<double>());
      }
      if (probs.size() != vocab->size()) {
        throw ParseError(where, fmt::format("{} probabilities for a vocabulary of {}", probs.size(),
                                            vocab->size()));
      }
      if (!table.emplace(std::move(prefix), TokenDistribution(std::move(probs))).second) {
        throw ParseError(where, "prefix listed twice");
      }
    } catch (const InputDomainError& e) {
      throw ParseError(where, e.what());
    }
  }
  return ScriptedModel(std::move(*vocab), std::move(table));
}

ScriptedModel LoadScriptedModel(const std::filesystem::path& path) {
  return ScriptedModelFromJson(ParseDocument(ReadTextFile(path), path));
}

std::unique_ptr<LanguageModel> LoadModel(std::string_view descriptor) {
  const auto colon = descriptor.find(':');
  if (colon == std::string_view::npos) {
    throw InputDomainError(fmt::format("model descriptor '{}' lacks a kind prefix", descriptor));
  }
  const std::string_view kind = descriptor.substr(0, colon);
  const std::string_view arg = descriptor.substr(colon + 1);
  if (kind == "uniform") {
    std::size_t size = 0;
    auto [end, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), size);
    if (ec != std::errc() || end != arg.data() + arg.size() || size == 0) {
      throw InputDomainError(fmt::format("uniform model needs a positive size, got '{}'", arg));
    }
    return std::make_unique<UniformModel>(size);
  }
  if (arg.empty()) throw InputDomainError(fmt::format("model descriptor '{}' lacks a path", descriptor));
  if (kind == "ngram") return std::make_unique<NGramModel>(LoadNGramModel(std::string(arg)));
  if (kind == "scripted") return std::make_unique<ScriptedModel>(LoadScriptedModel(std::string(arg)));
  throw InputDomainError(fmt::format("unknown model kind '{}'", kind));
}

}  // namespace treesearch
