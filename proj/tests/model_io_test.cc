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

#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "support/oracles.h"
#include "treesearch/errors.h"

namespace treesearch {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string LocationOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.location();
  }
  return "<no error>";
}

TEST(ModelIoTest, NGramJsonRoundTrip) {
  std::mt19937_64 rng(3);
  std::vector<std::string> corpus;
  const std::vector<std::string> words = {"x", "y", "z", "</s>"};
  for (int i = 0; i < 300; ++i) corpus.push_back(words[rng() % words.size()]);
  for (int order : {1, 2, 3}) {
    NGramModel model = TrainNGram(corpus, order, 0.25);
    NGramModel back = NGramModelFromJson(NGramModelToJson(model));
    EXPECT_EQ(back.vocabulary(), model.vocabulary());
    EXPECT_EQ(back.order(), order);
    EXPECT_EQ(back.alpha(), 0.25);
    EXPECT_EQ(back.counts(), model.counts());
    EXPECT_EQ(back.vocabulary().eos_id(), model.vocabulary().eos_id());
  }
}

TEST(ModelIoTest, NGramFileRoundTrip) {
  const fs::path path = fs::temp_directory_path() / "treesearch_model_io_ngram.json";
  const std::vector<std::string> corpus = {"a", "b", "a", "c"};
  NGramModel model = TrainNGram(corpus, 2, 1.0);
  SaveNGramModel(model, path);
  NGramModel back = LoadNGramModel(path);
  EXPECT_EQ(back.counts(), model.counts());
  const std::string text = ReadTextFile(path);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(json::parse(text)["format"], "treesearch-ngram");
  fs::remove(path);
}

TEST(ModelIoTest, NGramRejectsWrongFormat) {
  json doc = NGramModelToJson(TrainNGram(std::vector<std::string>{"a", "b"}, 2, 1.0));
  doc["format"] = "other";
  EXPECT_EQ(LocationOf([&] { NGramModelFromJson(doc); }), "/format");
  doc["format"] = "treesearch-ngram";
  doc["order"] = "two";
  EXPECT_EQ(LocationOf([&] { NGramModelFromJson(doc); }), "/order");
}

TEST(ModelIoTest, ScriptedRoundTrip) {
  std::mt19937_64 rng(8);
  testing::TableModel table = testing::RandomTableModel(rng, 3, 3, true);
  ScriptedModel model = table.ToScripted();
  ScriptedModel back = ScriptedModelFromJson(ScriptedModelToJson(model));
  EXPECT_EQ(back.vocabulary(), model.vocabulary());
  EXPECT_EQ(back.table(), model.table());
}

TEST(ModelIoTest, ScriptedFixtureLoads) {
  ScriptedModel model =
      LoadScriptedModel(fs::path(TREESEARCH_FIXTURE_DIR) / "worked_model.json");
  EXPECT_EQ(model.vocabulary().size(), 4u);
  EXPECT_FALSE(model.vocabulary().eos_id().has_value());
  EXPECT_EQ(model.NextDistribution(std::vector<TokenId>{1})[3], 0.5);
  // Unlisted prefixes fall back to uniform.
  EXPECT_EQ(model.NextDistribution(std::vector<TokenId>{3})[0], 0.25);
}

TEST(ModelIoTest, ScriptedValidation) {
  const json good = json::parse(R"({"vocab": ["a", "b"], "eos": null, "table": {"": [0.5, 0.5]}})");
  EXPECT_NO_THROW(ScriptedModelFromJson(good));
  json doc = good;
  doc["table"]["a"] = {0.5, 0.6};
  EXPECT_EQ(LocationOf([&] { ScriptedModelFromJson(doc); }), "/table/a");
  doc = good;
  doc["table"]["a"] = {1.0};
  EXPECT_EQ(LocationOf([&] { ScriptedModelFromJson(doc); }), "/table/a");
  doc = good;
  doc["table"]["q"] = {0.5, 0.5};
  EXPECT_EQ(LocationOf([&] { ScriptedModelFromJson(doc); }), "/table/q");
  doc = good;
  doc["eos"] = "</s>";
  EXPECT_EQ(LocationOf([&] { ScriptedModelFromJson(doc); }), "/eos");
  doc = good;
  doc["vocab"] = {"a", "a"};
  EXPECT_EQ(LocationOf([&] { ScriptedModelFromJson(doc); }), "/vocab");
}

TEST(ModelIoTest, LoadModelDescriptors) {
  EXPECT_EQ(LoadModel("uniform:5")->vocabulary().size(), 5u);
  EXPECT_THROW(LoadModel("uniform:0"), InputDomainError);
  EXPECT_THROW(LoadModel("uniform:x"), InputDomainError);
  EXPECT_THROW(LoadModel("uniform"), InputDomainError);
  EXPECT_THROW(LoadModel("lstm:weights.bin"), InputDomainError);
  EXPECT_THROW(LoadModel("ngram:"), InputDomainError);
  EXPECT_THROW(LoadModel("ngram:/nonexistent/model.json"), IoError);
  const std::string fixture = (fs::path(TREESEARCH_FIXTURE_DIR) / "worked_model.json").string();
  EXPECT_EQ(LoadModel("scripted:" + fixture)->Describe(), "scripted(V=4, prefixes=3)");
}

TEST(ModelIoTest, MalformedJsonReportsByteOffset) {
  const fs::path path = fs::temp_directory_path() / "treesearch_model_io_bad.json";
  WriteTextFile(path, "{\"vocab\": [");
  try {
    LoadScriptedModel(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(e.location().find("byte"), std::string::npos) << e.location();
  }
  fs::remove(path);
}

}  // namespace
}  // namespace treesearch
