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

#ifndef CDA_LEXICON_HPP
#define CDA_LEXICON_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cda/error.hpp"
#include "cda/text.hpp"

namespace cda {

struct GenderPair {
  std::string left;
  std::string right;

  friend bool operator==(const GenderPair&, const GenderPair&) = default;
};

enum class PronounCase { Subjective, Objective, Possessive, Unknown };

enum class Capitalization { Lower, Title, Upper };

/// Classifies a token as all-lower, ALL-CAPS or Title. Anything with an
/// uppercase letter that is not ALL-CAPS counts as Title, including
/// single-letter uppercase tokens.
inline Capitalization capitalization_of(std::string_view word) {
  std::size_t letters = 0, upper = 0;
  for (char c : word) {
    if (text::is_upper(c)) {
      ++letters;
      ++upper;
    } else if (text::is_lower(c)) {
      ++letters;
    }
  }
  if (upper == 0) return Capitalization::Lower;
  if (upper == letters && letters > 1) return Capitalization::Upper;
  return Capitalization::Title;
}

inline std::string apply_capitalization(std::string_view lower_word,
                                        Capitalization cap) {
  switch (cap) {
    case Capitalization::Lower:
      return std::string(lower_word);
    case Capitalization::Upper:
      return text::to_upper(lower_word);
    case Capitalization::Title: {
      std::string out(lower_word);
      for (char& c : out) {
        if (text::is_lower(c)) {
          c = static_cast<char>(c - 'a' + 'A');
          break;
        }
      }
      return out;
    }
  }
  return std::string(lower_word);
}

namespace detail {

inline constexpr std::array<std::pair<std::string_view, std::string_view>, 124>
    kDefaultPairs{{
    {"gods", "goddesses"},
    {"manager", "manageress"},
    {"barons", "baronesses"},
    {"nephew", "niece"},
    {"prince", "princess"},
    {"boars", "sows"},
    {"baron", "baroness"},
    {"stepfathers", "stepmothers"},
    {"wizard", "witch"},
    {"father", "mother"},
    {"stepsons", "stepdaughters"},
    {"sons-in-law", "daughters-in-law"},
    {"dukes", "duchesses"},
    {"boyfriend", "girlfriend"},
    {"fiances", "fiancees"},
    {"dad", "mom"},
    {"shepherd", "shepherdess"},
    {"uncles", "aunts"},
    {"beau", "belle"},
    {"males", "females"},
    {"hunter", "huntress"},
    {"beaus", "belles"},
    {"grandfathers", "grandmothers"},
    {"lads", "lasses"},
    {"daddies", "mummies"},
    {"step-son", "step-daughter"},
    {"masters", "mistresses"},
    {"policeman", "policewoman"},
    {"nephews", "nieces"},
    {"brother", "sister"},
    {"grandfather", "grandmother"},
    {"priest", "priestess"},
    {"hosts", "hostesses"},
    {"landlord", "landlady"},
    {"husband", "wife"},
    {"poet", "poetess"},
    {"landlords", "landladies"},
    {"fathers", "mothers"},
    {"masseur", "masseuse"},
    {"monks", "nuns"},
    {"usher", "usherette"},
    {"hero", "heroine"},
    {"stepson", "stepdaughter"},
    {"postman", "postwoman"},
    {"god", "goddess"},
    {"milkmen", "milkmaids"},
    {"stags", "hinds"},
    {"grandpa", "grandma"},
    {"chairmen", "chairwomen"},
    {"husbands", "wives"},
    {"grandpas", "grandmas"},
    {"stewards", "stewardesses"},
    {"murderer", "murderess"},
    {"manservant", "maidservant"},
    {"men", "women"},
    {"host", "hostess"},
    {"heirs", "heiresses"},
    {"masseurs", "masseuses"},
    {"boy", "girl"},
    {"male", "female"},
    {"son-in-law", "daughter-in-law"},
    {"waiter", "waitress"},
    {"tutors", "governesses"},
    {"priests", "priestesses"},
    {"bachelor", "spinster"},
    {"millionaire", "millionairess"},
    {"steward", "stewardess"},
    {"businessmen", "businesswomen"},
    {"congressman", "congresswoman"},
    {"emperor", "empress"},
    {"duke", "duchess"},
    {"sire", "dam"},
    {"son", "daughter"},
    {"sirs", "madams"},
    {"widower", "widow"},
    {"kings", "queens"},
    {"papas", "mamas"},
    {"grandsons", "granddaughters"},
    {"proprietor", "proprietress"},
    {"monk", "nun"},
    {"headmasters", "headmistresses"},
    {"grooms", "brides"},
    {"heir", "heiress"},
    {"boys", "girls"},
    {"gentleman", "lady"},
    {"uncle", "aunt"},
    {"he", "she"},
    {"king", "queen"},
    {"princes", "princesses"},
    {"policemen", "policewomen"},
    {"governor", "matron"},
    {"fiance", "fiancee"},
    {"step-father", "step-mother"},
    {"waiters", "waitresses"},
    {"mr", "mrs"},
    {"stepfather", "stepmother"},
    {"daddy", "mummy"},
    {"lords", "ladies"},
    {"widowers", "widows"},
    {"emperors", "empresses"},
    {"father-in-law", "mother-in-law"},
    {"abbot", "abbess"},
    {"sir", "madam"},
    {"actor", "actress"},
    {"mr.", "mrs."},
    {"wizards", "witches"},
    {"actors", "actresses"},
    {"chairman", "chairwoman"},
    {"sorcerer", "sorceress"},
    {"postmaster", "postmistress"},
    {"brothers", "sisters"},
    {"lad", "lass"},
    {"headmaster", "headmistress"},
    {"papa", "mama"},
    {"milkman", "milkmaid"},
    {"heroes", "heroines"},
    {"man", "woman"},
    {"grandson", "granddaughter"},
    {"groom", "bride"},
    {"sons", "daughters"},
    {"congressmen", "congresswomen"},
    {"businessman", "businesswoman"},
    {"boyfriends", "girlfriends"},
    {"dads", "moms"},
    }};

inline constexpr std::array<std::string_view, 64> kDefaultOccupations{
    "accountant",
    "air traffic controller",
    "architect",
    "artist",
    "attorney",
    "banker",
    "bartender",
    "barber",
    "bookkeeper",
    "builder",
    "businessperson",
    "butcher",
    "carpenter",
    "cashier",
    "chef",
    "coach",
    "dental hygienist",
    "dentist",
    "designer",
    "developer",
    "dietician",
    "doctor",
    "economist",
    "editor",
    "electrician",
    "engineer",
    "farmer",
    "filmmaker",
    "fisherman",
    "flight attendant",
    "jeweler",
    "judge",
    "lawyer",
    "mechanic",
    "musician",
    "nutritionist",
    "nurse",
    "optician",
    "painter",
    "pharmacist",
    "photographer",
    "physician",
    "physician's assistant",
    "pilot",
    "plumber",
    "police officer",
    "politician",
    "professor",
    "programmer",
    "psychologist",
    "receptionist",
    "salesperson",
    "scientist",
    "scholar",
    "secretary",
    "singer",
    "surgeon",
    "teacher",
    "therapist",
    "translator",
    "undertaker",
    "veterinarian",
    "videographer",
    "writer",
};

inline constexpr std::array<std::string_view, 6> kRulePronouns{
    "he", "she", "him", "his", "her", "hers"};

inline bool is_rule_pronoun(std::string_view w) {
  for (auto p : kRulePronouns) {
    if (p == w) return true;
  }
  return false;
}

// Pronoun rules. "her" needs the case to pick between him and his; without
// it the objective reading wins.
inline std::optional<std::string_view> pronoun_rule(std::string_view lower,
                                                    PronounCase pcase) {
  if (lower == "he") return "she";
  if (lower == "she") return "he";
  if (lower == "him") return "her";
  if (lower == "his") return "her";
  if (lower == "hers") return "his";
  if (lower == "her") {
    return pcase == PronounCase::Possessive ? "his" : "him";
  }
  return std::nullopt;
}

}  // namespace detail

/// Gendered-word dictionary, pronoun rules and occupation list. Immutable
/// once built; lookups are safe from many threads.
class Lexicon {
 public:
  /// Validates and indexes `pairs`. Throws InvalidLexicon when a word is
  /// empty, not lowercase, contains whitespace, maps to itself, appears in
  /// two pairs, or collides with the pronoun rules (only "he - she" may).
  Lexicon(std::vector<GenderPair> pairs, std::vector<std::string> occupations)
      : pairs_(std::move(pairs)), occupations_(std::move(occupations)) {
    for (const auto& p : pairs_) {
      check_word(p.left);
      check_word(p.right);
      if (p.left == p.right) {
        throw Error(ErrorCode::InvalidLexicon,
                    "pair maps '" + p.left + "' to itself");
      }
      const bool pronoun_pair = (p.left == "he" && p.right == "she") ||
                                (p.left == "she" && p.right == "he");
      if (!pronoun_pair && (detail::is_rule_pronoun(p.left) ||
                            detail::is_rule_pronoun(p.right))) {
        throw Error(ErrorCode::InvalidLexicon,
                    "pair '" + p.left + " - " + p.right +
                        "' overrides a pronoun rule");
      }
      add(p.left, p.right);
      add(p.right, p.left);
    }
  }

  const std::vector<GenderPair>& pairs() const { return pairs_; }
  const std::vector<std::string>& occupations() const { return occupations_; }

  /// True when the lowercase form of `word` has an opposite-gender dual.
  bool is_gendered(std::string_view word) const {
    const std::string lower = text::to_lower(word);
    return detail::is_rule_pronoun(lower) || map_.count(lower) > 0;
  }

  /// Returns the opposite-gender form of `word` with its capitalization
  /// pattern, or nullopt for non-gendered words.
  std::optional<std::string> lookup(std::string_view word,
                                    PronounCase pcase) const {
    if (word.empty() || text::has_whitespace(word)) {
      throw Error(ErrorCode::InvalidToken,
                  "'" + std::string(word) + "' is not a single token");
    }
    const std::string lower = text::to_lower(word);
    std::string_view dual;
    if (auto rule = detail::pronoun_rule(lower, pcase)) {
      dual = *rule;
    } else if (auto it = map_.find(lower); it != map_.end()) {
      dual = it->second;
    } else {
      return std::nullopt;
    }
    return apply_capitalization(dual, capitalization_of(word));
  }

  /// Replaces the pair table with one read from a `left<TAB>right` file.
  /// Blank lines and lines starting with '#' are skipped.
  static std::vector<GenderPair> read_pairs(const std::string& path) {
    std::vector<GenderPair> out;
    const auto all = text::lines(text::read_file(path));
    for (std::size_t i = 0; i < all.size(); ++i) {
      std::string_view line = text::trim(all[i]);
      if (line.empty() || line.front() == '#') continue;
      auto cols = text::split(line, '\t');
      if (cols.size() != 2) {
        throw Error(ErrorCode::Parse, path + ":" + std::to_string(i + 1) +
                                          ": expected left<TAB>right");
      }
      out.push_back({std::string(text::trim(cols[0])),
                     std::string(text::trim(cols[1]))});
    }
    return out;
  }

  /// One occupation per line; blank and '#' lines skipped.
  static std::vector<std::string> read_occupations(const std::string& path) {
    std::vector<std::string> out;
    for (const auto& raw : text::lines(text::read_file(path))) {
      std::string_view line = text::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      out.emplace_back(line);
    }
    return out;
  }

 private:
  static void check_word(const std::string& w) {
    if (w.empty() || text::has_whitespace(w) || text::to_lower(w) != w) {
      throw Error(ErrorCode::InvalidLexicon,
                  "pair word '" + w + "' must be a non-empty lowercase token");
    }
  }

  void add(const std::string& from, const std::string& to) {
    if (!map_.emplace(from, to).second) {
      throw Error(ErrorCode::InvalidLexicon,
                  "'" + from + "' appears in more than one pair");
    }
  }

  std::vector<GenderPair> pairs_;
  std::vector<std::string> occupations_;
  std::unordered_map<std::string, std::string> map_;
};

inline std::vector<GenderPair> default_pairs() {
  std::vector<GenderPair> out;
  out.reserve(detail::kDefaultPairs.size());
  for (auto [l, r] : detail::kDefaultPairs) {
    out.push_back({std::string(l), std::string(r)});
  }
  return out;
}

inline std::vector<std::string> default_occupations() {
  return {detail::kDefaultOccupations.begin(),
          detail::kDefaultOccupations.end()};
}

inline const Lexicon& default_lexicon() {
  static const Lexicon lexicon(default_pairs(), default_occupations());
  return lexicon;
}

}  // namespace cda

#endif  // CDA_LEXICON_HPP
