// Copyright 2026 The cdakit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CDA_CLI_HPP
#define CDA_CLI_HPP

#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cda/bias.hpp"
#include "cda/bridge.hpp"
#include "cda/corpus.hpp"
#include "cda/error.hpp"
#include "cda/intervention.hpp"
#include "cda/lexicon.hpp"
#include "cda/ngram.hpp"
#include "cda/templates.hpp"

namespace cda::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kValidationError = 2;
inline constexpr int kScorerError = 3;

inline int exit_code(ErrorCode code) {
  if (code == ErrorCode::Io) return kIoError;
  if (is_scorer_failure(code)) return kScorerError;
  return kValidationError;
}

namespace detail {

inline std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

inline Lexicon load_lexicon(const std::string& pairs_path) {
  if (pairs_path.empty()) return default_lexicon();
  return Lexicon(Lexicon::read_pairs(pairs_path), default_occupations());
}

struct AugmentOptions {
  std::string input;
  std::string format = "plain";
  std::string mode = "naive";
  bool allow_unannotated = false;
  std::string output;
  std::string lexicon;
  unsigned jobs = 1;
};

inline int augment(const AugmentOptions& o, std::ostream& out) {
  Corpus corpus;
  if (o.format == "plain") {
    corpus = read_plain(o.input);
  } else if (o.format == "docs") {
    corpus = read_documents(o.input);
  } else {
    corpus = import_conll_lite(o.input);
  }
  if (o.mode == "grammar" && corpus.mode() == CorpusMode::Plain && !o.allow_unannotated) {
    throw Error(ErrorCode::MissingClusters,
                o.input + ": grammar mode needs coreference clusters; plain input has none "
                          "(pass --allow-unannotated to fall back to naive swapping)");
  }
  const Lexicon lexicon = load_lexicon(o.lexicon);
  const Intervention c = o.mode == "naive" ? Intervention::naive(lexicon)
                                           : Intervention::grammar(lexicon, o.allow_unannotated);
  const Corpus augmented = cda_augment(corpus, c, o.jobs);
  if (augmented.mode() == CorpusMode::Plain) {
    write_plain(augmented, o.output);
  } else {
    write_documents(augmented, o.output);
  }
  out << "input items: " << corpus.size() << "\n"
      << "output items: " << augmented.size() << "\n";
  return kOk;
}

struct BiasOptions {
  std::string task = "lm";
  std::string scorer;
  std::string occupations;
  std::string templates;
  std::string report;
  std::string format = "json";
  std::string lexicon;
  long timeout_ms = 10000;
};

inline std::unique_ptr<Scorer> make_scorer(const std::string& spec, long timeout_ms) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos || colon + 1 == spec.size()) {
    throw Error(ErrorCode::Usage, "scorer must be ngram:PATH, table:PATH or bridge:CMD, got '" + spec + "'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "ngram") return std::make_unique<NgramScorer>(NgramModel::load(arg));
  if (kind == "table") return std::make_unique<TableScorer>(TableScorer::from_file(arg));
  if (kind == "bridge") {
    BridgeConfig config;
    config.command = {"/bin/sh", "-c", arg};
    config.timeout = std::chrono::milliseconds(timeout_ms);
    return bridge_scorer(std::move(config));
  }
  throw Error(ErrorCode::Usage, "unknown scorer kind '" + kind + "'");
}

inline int bias(const BiasOptions& o, std::ostream& out) {
  const ScoreKind kind = o.task == "coref" ? ScoreKind::CorefPair : ScoreKind::NextWord;
  auto scorer = make_scorer(o.scorer, o.timeout_ms);
  if (!scorer->supports(kind)) {
    throw Error(ErrorCode::Usage, "scorer '" + o.scorer + "' cannot score " + std::string(to_string(kind)) +
                                      " requests");
  }
  const Lexicon lexicon = load_lexicon(o.lexicon);
  const std::vector<std::string> occupations =
      o.occupations.empty() ? lexicon.occupations() : Lexicon::read_occupations(o.occupations);
  BiasReport report;
  if (kind == ScoreKind::CorefPair) {
    const auto templates =
        o.templates.empty() ? default_coref_templates() : read_templates<CorefTemplate>(o.templates);
    report = occupation_bias_report(std::span<const CorefTemplate>(templates),
                                    std::span<const std::string>(occupations), lexicon, *scorer);
  } else {
    const auto templates =
        o.templates.empty() ? default_lm_templates() : read_templates<LmTemplate>(o.templates);
    report = occupation_bias_report(std::span<const LmTemplate>(templates),
                                    std::span<const std::string>(occupations), lexicon, *scorer);
  }
  const std::string rendered = o.format == "json" ? report.to_json().dump(2) + "\n" : report.render_text();
  if (o.report.empty()) {
    out << rendered;
  } else {
    text::write_file(o.report, rendered);
  }
  out << "AOB: " << fixed9(report.aob) << "\n"
      << "signed AOB: " << fixed9(report.signed_aob) << "\n";
  return kOk;
}

struct TrainOptions {
  std::string corpus;
  int order = 3;
  double k = 1.0;
  std::size_t min_count = 1;
  std::string out;
};

inline int lm_train(const TrainOptions& o, std::ostream& out) {
  const Corpus corpus = read_plain(o.corpus);
  const NgramModel model = NgramModel::train(corpus, o.order, o.k, o.min_count);
  model.save(o.out);
  out << "sentences: " << corpus.size() << "\n"
      << "vocabulary: " << model.vocab_size() << "\n";
  return kOk;
}

inline int show(const std::string& what, std::ostream& out) {
  if (what == "pairs") {
    for (const auto& p : default_lexicon().pairs()) out << p.left << " - " << p.right << "\n";
  } else if (what == "occupations") {
    for (const auto& o : default_lexicon().occupations()) out << o << "\n";
  } else if (what == "templates-coref") {
    for (const auto& t : default_coref_templates()) out << t.markup() << "\n";
  } else {
    for (const auto& t : default_lm_templates()) out << t.line() << "\n";
  }
  return kOk;
}

}  // namespace detail

/// Runs the command line. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual data augmentation and gender-occupation bias toolkit", "cdakit"};
  app.require_subcommand(1);

  detail::AugmentOptions aug;
  auto* augment_cmd = app.add_subcommand("augment", "Append gender-swapped copies of every item");
  augment_cmd->add_option("--input", aug.input, "Input corpus")->required();
  augment_cmd->add_option("--format", aug.format, "Input format")
      ->check(CLI::IsMember({"plain", "docs", "conll"}));
  augment_cmd->add_option("--mode", aug.mode, "Intervention")->check(CLI::IsMember({"naive", "grammar"}));
  augment_cmd->add_flag("--allow-unannotated", aug.allow_unannotated,
                        "Let grammar mode swap naively where clusters are missing");
  augment_cmd->add_option("--output", aug.output, "Output path")->required();
  augment_cmd->add_option("--lexicon", aug.lexicon, "Gender pair file (left<TAB>right)");
  augment_cmd->add_option("--jobs", aug.jobs, "Worker threads")->check(CLI::Range(1u, 256u));

  detail::BiasOptions bo;
  auto* bias_cmd = app.add_subcommand("bias", "Measure gender-occupation bias of a scorer");
  bias_cmd->add_option("--task", bo.task, "Template family")->check(CLI::IsMember({"coref", "lm"}));
  bias_cmd->add_option("--scorer", bo.scorer, "ngram:PATH | table:PATH | bridge:CMD")->required();
  bias_cmd->add_option("--occupations", bo.occupations, "Occupation list, one per line");
  bias_cmd->add_option("--templates", bo.templates, "Template file for the task");
  bias_cmd->add_option("--report", bo.report, "Where to write the report (default: stdout)");
  bias_cmd->add_option("--format", bo.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  bias_cmd->add_option("--lexicon", bo.lexicon, "Gender pair file (left<TAB>right)");
  bias_cmd->add_option("--timeout-ms", bo.timeout_ms, "Bridge reply timeout")->check(CLI::PositiveNumber);

  detail::TrainOptions to;
  auto* train_cmd = app.add_subcommand("lm-train", "Train the n-gram language model");
  train_cmd->add_option("--corpus", to.corpus, "Plain corpus")->required();
  train_cmd->add_option("--order", to.order, "n-gram order")->check(CLI::Range(1, NgramModel::kMaxOrder));
  train_cmd->add_option("--k", to.k, "Add-k smoothing constant")->check(CLI::PositiveNumber);
  train_cmd->add_option("--min-count", to.min_count, "Map rarer tokens to <unk>");
  train_cmd->add_option("--out", to.out, "Model path")->required();

  std::string what;
  auto* show_cmd = app.add_subcommand("show", "Print embedded data, one item per line");
  show_cmd->add_option("--what", what, "Which list")
      ->required()
      ->check(CLI::IsMember({"pairs", "occupations", "templates-coref", "templates-lm"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kValidationError;
  }

  try {
    if (*augment_cmd) return detail::augment(aug, out);
    if (*bias_cmd) return detail::bias(bo, out);
    if (*train_cmd) return detail::lm_train(to, out);
    return detail::show(what, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"cdakit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cda::cli

#endif  // CDA_CLI_HPP
