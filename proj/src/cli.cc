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

#include "treesearch/cli.h"

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "treesearch/baselines.h"
#include "treesearch/engine.h"
#include "treesearch/errors.h"
#include "treesearch/model_io.h"
#include "treesearch/tree_io.h"

namespace treesearch::cli {
namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

// Flag problems found after CLI11 parsing; exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string model;
  std::string prompt;
  std::string score = "geometric";
  std::string sampler = "weighted";
  std::size_t k = 3;
  std::size_t batch = 4;
  int max_depth = 8;
  std::size_t iterations = 32;
  std::size_t max_nodes = 10000;
  std::uint64_t seed = 0;
  std::size_t top = 5;
  int repetition_penalty = 0;
  std::size_t hybrid_pool_factor = 2;
  std::size_t workers = 1;
  std::size_t beam_width = 2;
  std::string output = "text";
  std::string out;
  std::string manifest;
};

struct TrainOptions {
  std::string corpus;
  int order = 2;
  double alpha = 1.0;
  std::string out;
};

void ConfigureLogging(std::ostream& err) {
  auto logger = spdlog::get("treesearch");
  if (!logger) {
    logger = spdlog::stderr_logger_mt("treesearch");
    spdlog::set_default_logger(logger);
  }
  const char* env = std::getenv("TREESEARCH_LOG");
  const std::string level = env ? env : "error";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    err << "warning: ignoring TREESEARCH_LOG=" << level << " (expected error|info|debug)\n";
    spdlog::set_level(spdlog::level::err);
  }
}

void AddSharedFlags(CLI::App* sub, Options& o) {
  sub->add_option("--model", o.model, "uniform:V | ngram:PATH | scripted:PATH");
  sub->add_option("--prompt", o.prompt, "prompt text, whitespace-tokenized");
  sub->add_option("--score", o.score, "leaf scorer")
      ->check(CLI::IsMember({"geometric", "sumlog", "mean"}));
  sub->add_option("--sampler", o.sampler, "leaf sampler")
      ->check(CLI::IsMember({"weighted", "topk", "hybrid"}));
  sub->add_option("--k", o.k, "tokens added per extended leaf");
  sub->add_option("--batch", o.batch, "leaves extended per iteration");
  sub->add_option("--max-depth", o.max_depth, "maximum generated tokens");
  sub->add_option("--iterations", o.iterations, "search iteration budget");
  sub->add_option("--max-nodes", o.max_nodes, "tree size cap");
  sub->add_option("--seed", o.seed, "rng seed");
  sub->add_option("--top", o.top, "number of completions to report");
  sub->add_option("--repetition-penalty", o.repetition_penalty,
                  "longest allowed identical-token run; 0 disables");
  sub->add_option("--hybrid-pool-factor", o.hybrid_pool_factor, "hybrid sampler pool multiple");
  sub->add_option("--workers", o.workers, "concurrent model queries");
  sub->add_option("--output", o.output, "output format")
      ->check(CLI::IsMember({"text", "json", "dot"}));
  sub->add_option("--out", o.out, "write the output to PATH");
  sub->add_option("--manifest", o.manifest, "replay the run recorded in a manifest JSON file");
}

// Fills options absent from the command line with the manifest's values.
void ApplyManifest(const CLI::App& sub, Options& o) {
  if (o.manifest.empty()) return;
  json doc;
  try {
    doc = json::parse(ReadTextFile(o.manifest));
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: byte {}", o.manifest, e.byte), e.what());
  }
  // Accept either a bare manifest or a full JSON run output.
  if (doc.contains("manifest")) doc = doc["manifest"];
  if (!doc.is_object() || !doc.contains("config")) {
    throw ParseError(o.manifest, "not a treesearch run manifest");
  }
  const json& config = doc["config"];
  auto take = [&](const char* flag, const json& source, const char* key, auto& target) {
    const CLI::Option* option = sub.get_option_no_throw(flag);
    if (option == nullptr || option->count() > 0 || !source.contains(key)) return;
    try {
      source.at(key).get_to(target);
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("{}: /{}", o.manifest, key), e.what());
    }
  };
  take("--model", doc, "model", o.model);
  take("--prompt", doc, "prompt", o.prompt);
  take("--seed", doc, "seed", o.seed);
  take("--score", config, "score", o.score);
  take("--sampler", config, "sampler", o.sampler);
  take("--k", config, "k", o.k);
  take("--batch", config, "batch", o.batch);
  take("--max-depth", config, "max_depth", o.max_depth);
  take("--iterations", config, "iterations", o.iterations);
  take("--max-nodes", config, "max_nodes", o.max_nodes);
  take("--top", config, "top", o.top);
  take("--repetition-penalty", config, "repetition_penalty", o.repetition_penalty);
  take("--hybrid-pool-factor", config, "hybrid_pool_factor", o.hybrid_pool_factor);
  take("--workers", config, "workers", o.workers);
  take("--beam-width", config, "beam_width", o.beam_width);
  // The output format is replayed; the output path is not.
  if (doc.contains("artifacts")) take("--output", doc["artifacts"], "output", o.output);
}

json Manifest(const std::string& command, const Options& o, const LanguageModel& model) {
  json config = {
      {"score", o.score},
      {"sampler", o.sampler},
      {"k", o.k},
      {"batch", o.batch},
      {"max_depth", o.max_depth},
      {"iterations", o.iterations},
      {"max_nodes", o.max_nodes},
      {"top", o.top},
      {"repetition_penalty", o.repetition_penalty},
      {"hybrid_pool_factor", o.hybrid_pool_factor},
      {"workers", o.workers},
  };
  if (command == "compare") config["beam_width"] = o.beam_width;
  return {
      {"tool", "treesearch"},
      {"version", kVersion},
      {"command", command},
      {"model", o.model},
      {"model_description", model.Describe()},
      {"prompt", o.prompt},
      {"seed", o.seed},
      {"config", std::move(config)},
      {"artifacts", {{"output", o.output}, {"out", o.out.empty() ? json(nullptr) : json(o.out)}}},
  };
}

struct Resolved {
  std::unique_ptr<LanguageModel> model;
  TokenSequence prompt;
  SearchConfig config;
};

Resolved Resolve(const CLI::App& sub, Options& o) {
  ApplyManifest(sub, o);
  if (o.model.empty()) throw UsageError("--model is required");
  if (sub.count("--prompt") == 0 && o.manifest.empty()) throw UsageError("--prompt is required");

  Resolved r;
  try {
    r.model = LoadModel(o.model);
  } catch (const InputDomainError& e) {
    throw UsageError(e.what());
  }
  try {
    r.prompt = r.model->vocabulary().Tokenize(o.prompt);
  } catch (const InputDomainError& e) {
    throw UsageError(fmt::format("--prompt: {}", e.what()));
  }

  SearchConfig& c = r.config;
  auto scorer = ParseScorerKind(o.score);
  auto sampler = ParseSamplerKind(o.sampler);
  if (!scorer) throw UsageError(fmt::format("unknown scorer '{}'", o.score));
  if (!sampler) throw UsageError(fmt::format("unknown sampler '{}'", o.sampler));
  c.scorer = *scorer;
  c.sampler = *sampler;
  c.k = o.k;
  c.batch = o.batch;
  c.max_depth = o.max_depth;
  c.iterations = o.iterations;
  c.max_nodes = o.max_nodes;
  c.seed = o.seed;
  c.top_n = o.top;
  c.hybrid_pool_factor = o.hybrid_pool_factor;
  c.workers = o.workers;
  try {
    if (o.repetition_penalty != 0) c.evaluator = RepetitionPenaltyHook(o.repetition_penalty);
    c.Validate();
  } catch (const InputDomainError& e) {
    throw UsageError(e.what());
  }
  if (c.k > r.model->vocabulary().size()) {
    throw UsageError(fmt::format("--k {} exceeds vocabulary size {}", c.k,
                                 r.model->vocabulary().size()));
  }
  return r;
}

std::string FormatScore(const ConfidenceScore& score) {
  return fmt::format("{:.6g}", score.linear());
}

std::string Listing(const std::vector<CompletionResult>& results) {
  std::string text;
  for (std::size_t i = 0; i < results.size(); ++i) {
    text += fmt::format("#{} (score={}): {}\n", i + 1, FormatScore(results[i].score), results[i].text);
  }
  return text;
}

json ResultJson(const CompletionResult& r, std::size_t rank) {
  json item = {
      {"rank", rank},
      {"tokens", r.tokens},
      {"text", r.text},
      {"score", r.score.linear()},
      {"log_score", r.score.log_value()},
      {"terminal", r.terminal},
      {"depth", r.depth},
  };
  if (r.node) item["node"] = r.node->value;
  return item;
}

json ResultsJson(const std::vector<CompletionResult>& results) {
  json list = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) list.push_back(ResultJson(results[i], i + 1));
  return list;
}

// Wall time is left out so identical runs produce identical bytes.
json StatsJson(const SearchStats& s) {
  return {
      {"nodes_created", s.nodes_created},
      {"iterations_run", s.iterations_run},
      {"leaves_extended", s.leaves_extended},
      {"terminals_found", s.terminals_found},
  };
}

void Emit(const Options& o, std::ostream& out, const std::string& listing,
          const std::string& document) {
  if (o.output == "text") {
    out << listing;
    if (!o.out.empty()) WriteTextFile(o.out, listing);
    return;
  }
  if (o.out.empty()) {
    out << document;
  } else {
    WriteTextFile(o.out, document);
    out << listing;
  }
}

int CmdSearch(const CLI::App& sub, Options& o, std::ostream& out) {
  Resolved r = Resolve(sub, o);
  SearchOutcome outcome = RunSearch(*r.model, r.prompt, r.config);
  const std::string listing = Listing(outcome.results);
  std::string document;
  if (o.output == "json") {
    json doc = {
        {"manifest", Manifest("search", o, *r.model)},
        {"results", ResultsJson(outcome.results)},
        {"stats", StatsJson(outcome.stats)},
        {"tree", TreeToJson(outcome.tree)},
    };
    document = doc.dump(2) + "\n";
  } else if (o.output == "dot") {
    document = TreeToDot(outcome.tree);
  }
  Emit(o, out, listing, document);
  return 0;
}

int CmdCompare(const CLI::App& sub, Options& o, std::ostream& out) {
  if (o.output == "dot") throw UsageError("compare supports --output text or json");
  if (o.beam_width < 1) throw UsageError("--beam-width must be >= 1");
  Resolved r = Resolve(sub, o);
  const LanguageModel& model = *r.model;

  const CompletionResult greedy = GreedyDecode(model, r.prompt, r.config.max_depth);
  const std::vector<CompletionResult> beam =
      BeamSearch(model, r.prompt, o.beam_width, r.config.max_depth);
  const SearchOutcome tree = RunSearch(model, r.prompt, r.config);

  const CompletionResult& beam_top = beam.front();
  const CompletionResult& tree_top = tree.results.front();
  int beam_steps = 0;
  for (const auto& b : beam) beam_steps = std::max(beam_steps, b.depth);
  auto verdict = [](const CompletionResult& a, const CompletionResult& b) {
    return a.tokens == b.tokens ? "IDENTICAL" : "DIFFERENT";
  };
  const json manifest = Manifest("compare", o, model);

  std::string document;
  if (o.output == "json") {
    json doc = {
        {"manifest", manifest},
        {"greedy", ResultJson(greedy, 1)},
        {"beam", ResultsJson(beam)},
        {"tree", {{"results", ResultsJson(tree.results)}, {"stats", StatsJson(tree.stats)}}},
        {"agreement",
         {{"tree_vs_greedy", verdict(tree_top, greedy)},
          {"beam_vs_greedy", verdict(beam_top, greedy)},
          {"tree_vs_beam", verdict(tree_top, beam_top)}}},
    };
    document = doc.dump(2) + "\n";
  }

  std::string report = "== manifest ==\n" + manifest.dump(2) + "\n== results ==\n";
  report += fmt::format("{:<8}{:<28}{:<12}{}\n", "method", "score", "work", "top completion");
  report += fmt::format("{:<8}{:<28}{:<12}{}\n", "greedy",
                        fmt::format("{} (sumlog)", FormatScore(greedy.score)),
                        fmt::format("steps={}", greedy.depth), greedy.text);
  report += fmt::format("{:<8}{:<28}{:<12}{}\n", fmt::format("beam{}", o.beam_width),
                        fmt::format("{} (sumlog)", FormatScore(beam_top.score)),
                        fmt::format("steps={}", beam_steps), beam_top.text);
  report += fmt::format("{:<8}{:<28}{:<12}{}\n", "tree",
                        fmt::format("{} ({})", FormatScore(tree_top.score), o.score),
                        fmt::format("nodes={}", tree.stats.nodes_created), tree_top.text);
  report += "== agreement ==\n";
  report += fmt::format("tree vs greedy: {}\n", verdict(tree_top, greedy));
  report += fmt::format("beam vs greedy: {}\n", verdict(beam_top, greedy));
  report += fmt::format("tree vs beam: {}\n", verdict(tree_top, beam_top));

  Emit(o, out, report, document);
  return 0;
}

int CmdTrainNGram(const TrainOptions& t, std::ostream& out) {
  const std::vector<std::string> corpus = SplitWhitespace(ReadTextFile(t.corpus));
  if (corpus.empty()) throw InputDomainError(fmt::format("corpus '{}' is empty", t.corpus));
  const NGramModel model = TrainNGram(corpus, t.order, t.alpha);
  SaveNGramModel(model, t.out);
  out << fmt::format("wrote {} to {}\n", model.Describe(), t.out);
  return 0;
}

std::vector<char*> Argv(const std::vector<std::string>& args, std::vector<std::string>& storage) {
  storage.assign(1, "treesearch");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return argv;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ConfigureLogging(err);

  CLI::App app{"Confidence-guided tree search over token completions", "treesearch"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Options search_opts;
  CLI::App* search = app.add_subcommand("search", "run a tree search and rank completions");
  AddSharedFlags(search, search_opts);

  Options compare_opts;
  CLI::App* compare = app.add_subcommand("compare", "compare greedy, beam and tree search");
  AddSharedFlags(compare, compare_opts);
  compare->add_option("--beam-width", compare_opts.beam_width, "beam width");

  TrainOptions train_opts;
  CLI::App* train = app.add_subcommand("train-ngram", "train an add-alpha n-gram model");
  train->add_option("--corpus", train_opts.corpus, "whitespace-tokenized UTF-8 corpus")->required();
  train->add_option("--order", train_opts.order, "n-gram order");
  train->add_option("--alpha", train_opts.alpha, "add-alpha smoothing constant");
  train->add_option("--out", train_opts.out, "model output path")->required();

  std::vector<std::string> storage;
  std::vector<char*> argv = Argv(args, storage);
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  CLI::App* active = search->parsed() ? search : compare->parsed() ? compare : train;
  try {
    if (active == search) return CmdSearch(*search, search_opts, out);
    if (active == compare) return CmdCompare(*compare, compare_opts, out);
    return CmdTrainNGram(train_opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << active->help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace treesearch::cli
