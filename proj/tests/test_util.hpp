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

#ifndef CDA_TESTS_TEST_UTIL_HPP
#define CDA_TESTS_TEST_UTIL_HPP

#include <stdlib.h>

#include <filesystem>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cda/cda.hpp"

namespace cda::testing {

#ifndef CDA_TEST_DATA_DIR
#define CDA_TEST_DATA_DIR "tests/data"
#endif

inline std::string data_path(const std::string& name) {
  return std::string(CDA_TEST_DATA_DIR) + "/" + name;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "cdakit-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    const std::string p = file(name);
    text::write_file(p, content);
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline Sentence tagged(std::initializer_list<std::pair<const char*, const char*>> toks) {
  Sentence s;
  for (auto [t, p] : toks) s.tokens.push_back({t, std::string(p)});
  return s;
}

// Random POS-tagged sentences whose tags stay consistent after a swap:
// dictionary words (any capitalization), he/him/his/her with PRP/PRP$, and
// neutral filler.
class SentenceGenerator {
 public:
  explicit SentenceGenerator(unsigned seed, const Lexicon& lexicon = default_lexicon())
      : rng_(seed) {
    for (const auto& p : lexicon.pairs()) {
      if (p.left == "he") continue;
      dictionary_.push_back(p.left);
      dictionary_.push_back(p.right);
    }
  }

  Token token() {
    static const std::vector<std::pair<std::string, std::string>> pronouns{
        {"he", "PRP"}, {"she", "PRP"}, {"him", "PRP"}, {"her", "PRP"}, {"his", "PRP$"}, {"her", "PRP$"}};
    static const std::vector<std::pair<std::string, std::string>> filler{
        {"the", "DT"}, {"doctor", "NN"}, {"table", "NN"}, {"ran", "VBD"}, {"because", "IN"},
        {"late", "JJ"}, {".", "."}, {",", ","}, {"Elizabeth", "NNP"}, {"London", "NNP"}};
    const int kind = pick(0, 2);
    if (kind == 0) {
      std::string w = dictionary_[static_cast<std::size_t>(pick(0, static_cast<int>(dictionary_.size()) - 1))];
      return {apply_capitalization(w, random_cap()), std::string("NN")};
    }
    if (kind == 1) {
      const auto& p = pronouns[static_cast<std::size_t>(pick(0, static_cast<int>(pronouns.size()) - 1))];
      return {apply_capitalization(p.first, random_cap()), p.second};
    }
    const auto& f = filler[static_cast<std::size_t>(pick(0, static_cast<int>(filler.size()) - 1))];
    return {f.first, f.second};
  }

  Sentence sentence(int min_len = 1, int max_len = 12) {
    Sentence s;
    const int n = pick(min_len, max_len);
    for (int i = 0; i < n; ++i) s.tokens.push_back(token());
    return s;
  }

  Document document(const std::string& id, int max_sentences = 3) {
    Document d;
    d.doc_id = id;
    const int n = pick(1, max_sentences);
    for (int i = 0; i < n; ++i) d.sentences.push_back(sentence());
    const int clusters = pick(0, 3);
    for (int c = 0; c < clusters; ++c) {
      Cluster cluster;
      const int mentions = pick(1, 3);
      for (int m = 0; m < mentions; ++m) {
        const auto si = static_cast<std::size_t>(pick(0, n - 1));
        const int len = static_cast<int>(d.sentences[si].size());
        const int start = pick(0, len - 1);
        const int end = pick(start + 1, len);
        cluster.push_back({si, static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
      }
      d.clusters.push_back(std::move(cluster));
    }
    return d;
  }

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937& rng() { return rng_; }

 private:
  Capitalization random_cap() {
    const int c = pick(0, 5);
    return c < 4 ? Capitalization::Lower : (c == 4 ? Capitalization::Title : Capitalization::Upper);
  }

  std::mt19937 rng_;
  std::vector<std::string> dictionary_;
};

// (text, clusters) view of a document, ignoring its id.
inline std::pair<std::vector<std::vector<std::string>>, std::vector<Cluster>> content_of(const Document& d) {
  std::vector<std::vector<std::string>> words;
  for (const auto& s : d.sentences) {
    std::vector<std::string> w;
    for (const auto& t : s.tokens) w.push_back(t.text);
    words.push_back(std::move(w));
  }
  return {words, d.clusters};
}

inline auto content_set(const Corpus& corpus) {
  std::set<decltype(content_of(Document{}))> out;
  for (const auto& d : corpus.documents()) out.insert(content_of(d));
  return out;
}

}  // namespace cda::testing

#endif  // CDA_TESTS_TEST_UTIL_HPP
