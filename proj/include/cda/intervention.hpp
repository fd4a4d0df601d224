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

#ifndef CDA_INTERVENTION_HPP
#define CDA_INTERVENTION_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "cda/corpus.hpp"
#include "cda/error.hpp"
#include "cda/lexicon.hpp"

namespace cda {

/// Case of a pronoun token from its POS tag and surface form. PRP$ is always
/// possessive; otherwise he/she are subjective, him/her objective and
/// his/hers possessive. Untagged tokens are Unknown.
inline PronounCase pronoun_case(const Token& tok) {
  if (!tok.pos) return PronounCase::Unknown;
  if (*tok.pos == "PRP$") return PronounCase::Possessive;
  const std::string lower = text::to_lower(tok.text);
  if (lower == "he" || lower == "she") return PronounCase::Subjective;
  if (lower == "his" || lower == "hers") return PronounCase::Possessive;
  return PronounCase::Objective;
}

inline bool is_proper_noun(const Token& tok) {
  return tok.pos && (*tok.pos == "NNP" || *tok.pos == "NNPS");
}

/// Swaps one token for its dual. POS tags carry over unchanged: every
/// pronoun rule maps PRP to PRP and PRP$ to PRP$.
inline Token flip_token(const Token& tok, const Lexicon& lexicon) {
  if (auto dual = lexicon.lookup(tok.text, pronoun_case(tok))) {
    return Token{std::move(*dual), tok.pos};
  }
  return tok;
}

inline Sentence apply_naive(const Sentence& sentence, const Lexicon& lexicon) {
  Sentence out;
  out.tokens.reserve(sentence.tokens.size());
  for (const auto& tok : sentence.tokens) out.tokens.push_back(flip_token(tok, lexicon));
  return out;
}

inline Document apply_naive(const Document& doc, const Lexicon& lexicon) {
  Document out{doc.doc_id, {}, doc.clusters};
  out.sentences.reserve(doc.sentences.size());
  for (const auto& s : doc.sentences) out.sentences.push_back(apply_naive(s, lexicon));
  return out;
}

/// Token positions covered by mentions of clusters that contain a proper
/// noun somewhere in their mentions. Indexed [sentence][token].
inline std::vector<std::vector<bool>> protected_positions(const Document& doc) {
  std::vector<std::vector<bool>> mask;
  mask.reserve(doc.sentences.size());
  for (const auto& s : doc.sentences) mask.emplace_back(s.size(), false);
  for (const auto& cluster : doc.clusters) {
    bool has_proper = false;
    for (const auto& m : cluster) {
      const auto& toks = doc.sentences.at(m.sentence).tokens;
      for (std::size_t i = m.start; i < m.end && !has_proper; ++i) {
        has_proper = is_proper_noun(toks.at(i));
      }
      if (has_proper) break;
    }
    if (!has_proper) continue;
    for (const auto& m : cluster) {
      for (std::size_t i = m.start; i < m.end; ++i) mask[m.sentence][i] = true;
    }
  }
  return mask;
}

/// Naive swap that leaves mentions of proper-noun clusters untouched. A
/// document without clusters is rejected unless `allow_unannotated`, in
/// which case it is flipped naively.
inline Document apply_grammar(const Document& doc, const Lexicon& lexicon,
                              bool allow_unannotated = false) {
  if (doc.clusters.empty()) {
    if (!allow_unannotated) {
      throw Error(ErrorCode::MissingClusters,
                  "document '" + doc.doc_id + "' has no coreference clusters");
    }
    return apply_naive(doc, lexicon);
  }
  validate(doc);
  const auto mask = protected_positions(doc);
  Document out{doc.doc_id, {}, doc.clusters};
  out.sentences.reserve(doc.sentences.size());
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    Sentence flipped;
    const auto& toks = doc.sentences[s].tokens;
    flipped.tokens.reserve(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
      flipped.tokens.push_back(mask[s][i] ? toks[i] : flip_token(toks[i], lexicon));
    }
    out.sentences.push_back(std::move(flipped));
  }
  return out;
}

inline Sentence apply_grammar(const Sentence& sentence, const Lexicon& lexicon,
                              bool allow_unannotated = false) {
  if (!allow_unannotated) {
    throw Error(ErrorCode::MissingClusters,
                "grammar intervention needs coreference clusters; plain sentences have none");
  }
  return apply_naive(sentence, lexicon);
}

enum class InterventionKind { Naive, Grammar };

/// A gender intervention bound to a lexicon. The lexicon must outlive it.
class Intervention {
 public:
  static Intervention naive(const Lexicon& lexicon) {
    return Intervention(InterventionKind::Naive, lexicon, false);
  }
  static Intervention grammar(const Lexicon& lexicon, bool allow_unannotated = false) {
    return Intervention(InterventionKind::Grammar, lexicon, allow_unannotated);
  }

  InterventionKind kind() const { return kind_; }
  const Lexicon& lexicon() const { return *lexicon_; }
  bool allow_unannotated() const { return allow_unannotated_; }

  Sentence operator()(const Sentence& s) const {
    return kind_ == InterventionKind::Naive ? apply_naive(s, *lexicon_)
                                            : apply_grammar(s, *lexicon_, allow_unannotated_);
  }
  Document operator()(const Document& d) const {
    return kind_ == InterventionKind::Naive ? apply_naive(d, *lexicon_)
                                            : apply_grammar(d, *lexicon_, allow_unannotated_);
  }

 private:
  Intervention(InterventionKind kind, const Lexicon& lexicon, bool allow)
      : kind_(kind), lexicon_(&lexicon), allow_unannotated_(allow) {}

  InterventionKind kind_;
  const Lexicon* lexicon_;
  bool allow_unannotated_;
};

template <class T>
struct MatchedPair {
  T original;
  T intervened;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

template <class T>
struct MatchedPairSet {
  std::vector<MatchedPair<T>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  auto begin() const { return pairs.begin(); }
  auto end() const { return pairs.end(); }
};

namespace detail {

// Maps `fn` over `items` on up to `jobs` threads. Output order follows input
// order; the first exception (by index) is rethrown.
template <class T, class Fn>
auto parallel_map(std::span<const T> items, Fn&& fn, unsigned jobs)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
  using R = std::invoke_result_t<Fn&, const T&>;
  const std::size_t n = items.size();
  if (jobs <= 1 || n < 2) {
    std::vector<R> out;
    out.reserve(n);
    for (const auto& item : items) out.push_back(fn(item));
    return out;
  }
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::min<std::size_t>(jobs, n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          slots[i].emplace(fn(items[i]));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace detail

/// i / c for every item: pairs[i] = (items[i], c(items[i])).
template <class T, class Intervene>
MatchedPairSet<T> matched_pairs(std::span<const T> items, const Intervene& c,
                                unsigned jobs = 1) {
  auto flipped = detail::parallel_map(items, [&](const T& x) { return c(x); }, jobs);
  MatchedPairSet<T> set;
  set.pairs.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    set.pairs.push_back({items[i], std::move(flipped[i])});
  }
  return set;
}

template <class T>
MatchedPairSet<T> matched_pairs(const Corpus& corpus, const Intervention& c, unsigned jobs = 1) {
  static_assert(std::is_same_v<T, Sentence> || std::is_same_v<T, Document>);
  if constexpr (std::is_same_v<T, Sentence>) {
    return matched_pairs(std::span<const Sentence>(corpus.sentences()), c, jobs);
  } else {
    return matched_pairs(std::span<const Document>(corpus.documents()), c, jobs);
  }
}

inline constexpr std::string_view kAugmentedSuffix = "#cda";

/// D followed by c(D). Intervened documents keep the original clusters and
/// get `kAugmentedSuffix` appended to their id.
inline Corpus cda_augment(const Corpus& corpus, const Intervention& c, unsigned jobs = 1) {
  if (corpus.mode() == CorpusMode::Plain) {
    const auto& src = corpus.sentences();
    auto flipped = detail::parallel_map(std::span<const Sentence>(src),
                                        [&](const Sentence& s) { return c(s); }, jobs);
    std::vector<Sentence> out(src.begin(), src.end());
    out.insert(out.end(), std::make_move_iterator(flipped.begin()),
               std::make_move_iterator(flipped.end()));
    return Corpus::plain(std::move(out));
  }
  const auto& src = corpus.documents();
  auto flipped = detail::parallel_map(std::span<const Document>(src),
                                      [&](const Document& d) {
                                        Document x = c(d);
                                        x.doc_id = d.doc_id + std::string(kAugmentedSuffix);
                                        x.clusters = d.clusters;
                                        return x;
                                      },
                                      jobs);
  std::vector<Document> out(src.begin(), src.end());
  out.insert(out.end(), std::make_move_iterator(flipped.begin()),
             std::make_move_iterator(flipped.end()));
  return Corpus::annotated(std::move(out));
}

}  // namespace cda

#endif  // CDA_INTERVENTION_HPP
