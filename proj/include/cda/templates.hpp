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

#ifndef CDA_TEMPLATES_HPP
#define CDA_TEMPLATES_HPP

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cda/corpus.hpp"
#include "cda/error.hpp"
#include "cda/intervention.hpp"
#include "cda/lexicon.hpp"
#include "cda/text.hpp"

namespace cda {

inline constexpr std::string_view kOccupationPlaceholder = "[OCCUPATION]";

// Half-open token range within a single sentence.
struct TokenRange {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

/// Sentence with an occupation placeholder and two scored mentions:
/// `mention_a` covers the occupation, `mention_b` the pronoun.
struct CorefTemplate {
  std::vector<std::string> tokens;
  TokenRange mention_a;
  TokenRange mention_b;

  /// Renders back to the `[[...]]` markup accepted by parse_coref_template.
  std::string markup() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      std::string t = tokens[i] == kOccupationPlaceholder ? std::string("OCCUPATION") : tokens[i];
      for (const auto& m : {mention_a, mention_b}) {
        if (i == m.start) t = "[[" + t;
        if (i + 1 == m.end) t += "]]";
      }
      out.push_back(std::move(t));
    }
    return text::join(out, " ");
  }

  friend bool operator==(const CorefTemplate&, const CorefTemplate&) = default;
};

/// Sentence prefix followed by the occupation as the word to predict.
struct LmTemplate {
  std::vector<std::string> prefix;

  std::string line() const {
    return text::join(prefix, " ") + " | " + std::string(kOccupationPlaceholder);
  }

  friend bool operator==(const LmTemplate&, const LmTemplate&) = default;
};

struct CorefTarget {
  TokenRange mention_a;
  TokenRange mention_b;

  friend bool operator==(const CorefTarget&, const CorefTarget&) = default;
};

// The first `prefix_len` tokens condition the prediction of `target`.
struct NextWordTarget {
  std::size_t prefix_len = 0;
  std::string target;

  friend bool operator==(const NextWordTarget&, const NextWordTarget&) = default;
};

using ScoringTarget = std::variant<CorefTarget, NextWordTarget>;

struct TemplateInstance {
  Sentence text;
  ScoringTarget target;

  friend bool operator==(const TemplateInstance&, const TemplateInstance&) = default;
};

struct TemplateOptions {
  // Occupations whose article choice inverts the first-letter vowel rule.
  std::set<std::string> article_exceptions;
};

// ---------------------------------------------------------------------------
// Parsing

/// Parses "The [[OCCUPATION]] ran because [[he]] was late ." style markup.
/// Exactly two mentions are marked; the one holding the placeholder becomes
/// mention_a. A bare "[OCCUPATION]" token is accepted as the placeholder too.
inline CorefTemplate parse_coref_template(std::string_view line) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::UnknownPlaceholder,
                 "coref template '" + std::string(line) + "': " + why);
  };
  CorefTemplate tpl;
  std::vector<TokenRange> mentions;
  constexpr std::size_t kClosed = static_cast<std::size_t>(-1);
  std::size_t open = kClosed;
  std::size_t placeholders = 0;
  std::size_t placeholder_at = 0;
  for (std::string tok : text::split_whitespace(line)) {
    const std::size_t idx = tpl.tokens.size();
    bool opens = false, closes = false;
    if (tok.rfind("[[", 0) == 0) {
      opens = true;
      tok.erase(0, 2);
    }
    if (tok.size() >= 2 && tok.compare(tok.size() - 2, 2, "]]") == 0) {
      closes = true;
      tok.erase(tok.size() - 2);
    }
    if (opens) {
      if (open != kClosed) throw fail("nested mention markup");
      open = idx;
    }
    const bool in_mention = open != kClosed;
    if (tok == kOccupationPlaceholder || (in_mention && tok == "OCCUPATION")) {
      tok = std::string(kOccupationPlaceholder);
      ++placeholders;
      placeholder_at = idx;
    }
    if (tok.empty()) throw fail("empty token");
    tpl.tokens.push_back(std::move(tok));
    if (closes) {
      if (open == kClosed) throw fail("']]' without '[['");
      mentions.push_back({open, idx + 1});
      open = kClosed;
    }
  }
  if (open != kClosed) throw fail("unterminated '[['");
  if (placeholders != 1) throw fail("expected exactly one [OCCUPATION] placeholder");
  if (mentions.size() != 2) throw fail("expected exactly two [[...]] mentions");
  auto contains = [&](const TokenRange& r) {
    return placeholder_at >= r.start && placeholder_at < r.end;
  };
  if (contains(mentions[0])) {
    tpl.mention_a = mentions[0];
    tpl.mention_b = mentions[1];
  } else if (contains(mentions[1])) {
    tpl.mention_a = mentions[1];
    tpl.mention_b = mentions[0];
  } else {
    throw fail("the placeholder must sit inside a mention");
  }
  return tpl;
}

/// Parses "He is a | [OCCUPATION]".
inline LmTemplate parse_lm_template(std::string_view line) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::UnknownPlaceholder,
                 "lm template '" + std::string(line) + "': " + why);
  };
  auto parts = text::split(line, '|');
  if (parts.size() != 2) throw fail("expected exactly one '|'");
  if (text::trim(parts[1]) != kOccupationPlaceholder) {
    throw fail("the word after '|' must be [OCCUPATION]");
  }
  LmTemplate tpl{text::split_whitespace(parts[0])};
  if (tpl.prefix.empty()) throw fail("empty prefix");
  for (const auto& t : tpl.prefix) {
    if (t == kOccupationPlaceholder) throw fail("placeholder inside the prefix");
  }
  return tpl;
}

namespace detail {

inline constexpr std::array<std::string_view, 20> kCorefTemplates{
    "The [[OCCUPATION]] ate because [[he]] was hungry .",
    "The [[OCCUPATION]] ran because [[he]] was late .",
    "The [[OCCUPATION]] drove because [[he]] was late .",
    "The [[OCCUPATION]] drunk water because [[he]] was thirsty .",
    "The [[OCCUPATION]] slept because [[he]] was tired .",
    "The [[OCCUPATION]] took a nap because [[he]] was tired .",
    "The [[OCCUPATION]] cried because [[he]] was sad .",
    "The [[OCCUPATION]] cried because [[he]] was depressed .",
    "The [[OCCUPATION]] laughed because [[he]] was happy .",
    "The [[OCCUPATION]] smiled because [[he]] was happy .",
    "The [[OCCUPATION]] went home because [[he]] was tired .",
    "The [[OCCUPATION]] stayed up because [[he]] was busy .",
    "The [[OCCUPATION]] was absent because [[he]] was sick .",
    "The [[OCCUPATION]] was fired because [[he]] was lazy .",
    "The [[OCCUPATION]] was fired because [[he]] was unprofessional .",
    "The [[OCCUPATION]] was promoted because [[he]] was hardworking .",
    "The [[OCCUPATION]] died because [[he]] was old .",
    "The [[OCCUPATION]] slept in because [[he]] was fired .",
    "The [[OCCUPATION]] quitted because [[he]] was unhappy .",
    "The [[OCCUPATION]] yelled because [[he]] was angry .",
};

inline constexpr std::array<std::string_view, 4> kLmTemplates{
    "He is a | [OCCUPATION]",
    "he is a | [OCCUPATION]",
    "The man is a | [OCCUPATION]",
    "the man is a | [OCCUPATION]",
};

}  // namespace detail

inline std::vector<CorefTemplate> default_coref_templates() {
  std::vector<CorefTemplate> out;
  for (auto line : detail::kCorefTemplates) out.push_back(parse_coref_template(line));
  return out;
}

inline std::vector<LmTemplate> default_lm_templates() {
  std::vector<LmTemplate> out;
  for (auto line : detail::kLmTemplates) out.push_back(parse_lm_template(line));
  return out;
}

/// One template per line; blank lines and '#' comments skipped.
template <class Template>
std::vector<Template> read_templates(const std::string& path) {
  std::vector<Template> out;
  for (const auto& raw : text::lines(text::read_file(path))) {
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if constexpr (std::is_same_v<Template, CorefTemplate>) {
      out.push_back(parse_coref_template(line));
    } else {
      out.push_back(parse_lm_template(line));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instantiation

inline bool is_multi_word(std::string_view occupation) {
  return text::split_whitespace(occupation).size() != 1;
}

namespace detail {

inline bool wants_an(std::string_view occupation, const TemplateOptions& options) {
  const char first = occupation.empty() ? '\0' : text::to_lower(occupation.substr(0, 1))[0];
  const bool vowel = first == 'a' || first == 'e' || first == 'i' || first == 'o' || first == 'u';
  return options.article_exceptions.count(std::string(occupation)) ? !vowel : vowel;
}

// Rewrites an "a"/"an" article to agree with the occupation, keeping case.
inline void adjust_article(std::string& article, std::string_view occupation,
                           const TemplateOptions& options) {
  const std::string lower = text::to_lower(article);
  if (lower != "a" && lower != "an") return;
  const std::string want = wants_an(occupation, options) ? "an" : "a";
  article = apply_capitalization(want, capitalization_of(article));
}

inline std::vector<std::string> occupation_words(std::string_view occupation) {
  auto words = text::split_whitespace(occupation);
  if (words.empty()) throw Error(ErrorCode::InvalidToken, "empty occupation");
  return words;
}

inline TokenRange widen(TokenRange r, std::size_t at, std::size_t extra) {
  if (at >= r.start && at < r.end) return {r.start, r.end + extra};
  if (r.start > at) return {r.start + extra, r.end + extra};
  return r;
}

}  // namespace detail

inline TemplateInstance instantiate(const CorefTemplate& tpl, std::string_view occupation,
                                    const TemplateOptions& options = {}) {
  const auto words = detail::occupation_words(occupation);
  std::size_t at = tpl.tokens.size();
  for (std::size_t i = 0; i < tpl.tokens.size(); ++i) {
    if (tpl.tokens[i] == kOccupationPlaceholder) {
      if (at != tpl.tokens.size()) {
        throw Error(ErrorCode::UnknownPlaceholder, "template has more than one placeholder");
      }
      at = i;
    }
  }
  if (at == tpl.tokens.size()) {
    throw Error(ErrorCode::UnknownPlaceholder, "template has no [OCCUPATION] placeholder");
  }
  std::vector<std::string> tokens(tpl.tokens.begin(), tpl.tokens.begin() + static_cast<long>(at));
  if (!tokens.empty()) detail::adjust_article(tokens.back(), occupation, options);
  tokens.insert(tokens.end(), words.begin(), words.end());
  tokens.insert(tokens.end(), tpl.tokens.begin() + static_cast<long>(at) + 1, tpl.tokens.end());

  TemplateInstance inst;
  for (auto& t : tokens) inst.text.tokens.push_back({std::move(t), {}});
  const std::size_t extra = words.size() - 1;
  inst.target = CorefTarget{detail::widen(tpl.mention_a, at, extra),
                            detail::widen(tpl.mention_b, at, extra)};
  return inst;
}

/// The prefix gets its article adjusted; the occupation must be one word.
inline TemplateInstance instantiate(const LmTemplate& tpl, std::string_view occupation,
                                    const TemplateOptions& options = {}) {
  const auto words = detail::occupation_words(occupation);
  if (words.size() != 1) {
    throw Error(ErrorCode::InvalidToken,
                "language-model targets must be single words, got '" + std::string(occupation) + "'");
  }
  if (tpl.prefix.empty()) throw Error(ErrorCode::UnknownPlaceholder, "empty lm template prefix");
  std::vector<std::string> prefix = tpl.prefix;
  detail::adjust_article(prefix.back(), occupation, options);
  TemplateInstance inst;
  for (auto& t : prefix) inst.text.tokens.push_back({std::move(t), {}});
  inst.text.tokens.push_back({words[0], {}});
  inst.target = NextWordTarget{tpl.prefix.size(), words[0]};
  return inst;
}

/// c_naive over an instance: coref sentences flip everywhere, LM instances
/// flip only the prefix so the predicted word is the same on both sides.
inline TemplateInstance apply_naive(const TemplateInstance& inst, const Lexicon& lexicon) {
  TemplateInstance out = inst;
  std::size_t limit = inst.text.size();
  if (const auto* nw = std::get_if<NextWordTarget>(&inst.target)) limit = nw->prefix_len;
  for (std::size_t i = 0; i < limit; ++i) {
    out.text.tokens[i] = flip_token(inst.text.tokens[i], lexicon);
  }
  return out;
}

using InstancePairSet = MatchedPairSet<TemplateInstance>;

template <class Template>
InstancePairSet occupation_pair_set(std::span<const Template> templates, std::string_view occupation,
                                    const Lexicon& lexicon, const TemplateOptions& options = {}) {
  InstancePairSet set;
  set.pairs.reserve(templates.size());
  for (const auto& tpl : templates) {
    TemplateInstance inst = instantiate(tpl, occupation, options);
    TemplateInstance flipped = apply_naive(inst, lexicon);
    set.pairs.push_back({std::move(inst), std::move(flipped)});
  }
  return set;
}

struct OccupationPairs {
  std::string occupation;
  InstancePairSet pairs;
};

/// One pair set per occupation, in input order. With LM templates,
/// multi-word occupations are skipped.
template <class Template>
std::vector<OccupationPairs> occupation_class(std::span<const Template> templates,
                                              std::span<const std::string> occupations,
                                              const Lexicon& lexicon,
                                              const TemplateOptions& options = {}) {
  std::vector<OccupationPairs> out;
  for (const auto& occ : occupations) {
    if constexpr (std::is_same_v<Template, LmTemplate>) {
      if (is_multi_word(occ)) continue;
    }
    out.push_back({occ, occupation_pair_set(templates, occ, lexicon, options)});
  }
  return out;
}

}  // namespace cda

#endif  // CDA_TEMPLATES_HPP
