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

#ifndef CDA_CORPUS_HPP
#define CDA_CORPUS_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cda/error.hpp"
#include "cda/text.hpp"
#include "json.hpp"

namespace cda {

struct Token {
  std::string text;
  std::optional<std::string> pos;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  std::vector<std::string> words() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.text);
    return out;
  }
  std::string str() const { return text::join(words(), " "); }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

inline Sentence make_sentence(std::string_view line) {
  Sentence s;
  for (auto& w : text::split_whitespace(line)) s.tokens.push_back({std::move(w), {}});
  return s;
}

// Half-open token range [start, end) inside one sentence.
struct MentionSpan {
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const MentionSpan&, const MentionSpan&) = default;
  friend auto operator<=>(const MentionSpan&, const MentionSpan&) = default;
};

using Cluster = std::vector<MentionSpan>;

struct Document {
  std::string doc_id;
  std::vector<Sentence> sentences;
  std::vector<Cluster> clusters;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }

  friend bool operator==(const Document&, const Document&) = default;
};

/// Throws SpanOutOfBounds (naming the doc) if any mention is empty or falls
/// outside its sentence.
inline void validate(const Document& doc) {
  for (std::size_t c = 0; c < doc.clusters.size(); ++c) {
    for (const auto& m : doc.clusters[c]) {
      const bool ok = m.sentence < doc.sentences.size() && m.start < m.end &&
                      m.end <= doc.sentences[m.sentence].size();
      if (!ok) {
        throw Error(ErrorCode::SpanOutOfBounds,
                    "document '" + doc.doc_id + "' cluster " +
                        std::to_string(c) + " has span [" +
                        std::to_string(m.sentence) + "," +
                        std::to_string(m.start) + "," + std::to_string(m.end) +
                        "] outside its sentence");
      }
    }
  }
}

enum class CorpusMode { Plain, Annotated };

/// Either a list of plain sentences or a list of annotated documents.
class Corpus {
 public:
  Corpus() = default;

  static Corpus plain(std::vector<Sentence> sentences) {
    Corpus c;
    c.items_ = std::move(sentences);
    return c;
  }
  static Corpus annotated(std::vector<Document> documents) {
    Corpus c;
    c.items_ = std::move(documents);
    return c;
  }

  CorpusMode mode() const {
    return std::holds_alternative<std::vector<Sentence>>(items_)
               ? CorpusMode::Plain
               : CorpusMode::Annotated;
  }

  std::size_t size() const {
    return std::visit([](const auto& v) { return v.size(); }, items_);
  }
  bool empty() const { return size() == 0; }

  const std::vector<Sentence>& sentences() const {
    if (mode() != CorpusMode::Plain) {
      throw Error(ErrorCode::ModeMismatch, "corpus holds documents, not sentences");
    }
    return std::get<std::vector<Sentence>>(items_);
  }
  const std::vector<Document>& documents() const {
    if (mode() != CorpusMode::Annotated) {
      throw Error(ErrorCode::ModeMismatch, "corpus holds sentences, not documents");
    }
    return std::get<std::vector<Document>>(items_);
  }

  std::size_t token_count() const {
    std::size_t n = 0;
    if (mode() == CorpusMode::Plain) {
      for (const auto& s : sentences()) n += s.size();
    } else {
      for (const auto& d : documents()) n += d.token_count();
    }
    return n;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::variant<std::vector<Sentence>, std::vector<Document>> items_;
};

// ---------------------------------------------------------------------------
// Plain text: one sentence per line, whitespace-separated tokens.

inline Corpus parse_plain(std::string_view data, const std::string& name = "<input>") {
  if (auto bad = text::find_invalid_utf8(data); bad != std::string_view::npos) {
    throw Error(ErrorCode::Encoding,
                name + ": invalid UTF-8 at byte " + std::to_string(bad));
  }
  std::vector<Sentence> sentences;
  for (const auto& line : text::lines(data)) {
    Sentence s = make_sentence(line);
    if (!s.tokens.empty()) sentences.push_back(std::move(s));
  }
  return Corpus::plain(std::move(sentences));
}

inline Corpus read_plain(const std::string& path) {
  return parse_plain(text::read_file(path), path);
}

inline std::string format_plain(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.sentences()) {
    out += s.str();
    out += '\n';
  }
  return out;
}

inline void write_plain(const Corpus& corpus, const std::string& path) {
  text::write_file(path, format_plain(corpus));
}

// ---------------------------------------------------------------------------
// JSON-lines documents.

inline nlohmann::json to_json(const Document& doc) {
  nlohmann::json sentences = nlohmann::json::array();
  for (const auto& s : doc.sentences) {
    nlohmann::json tokens = nlohmann::json::array();
    for (const auto& t : s.tokens) {
      nlohmann::json tok = nlohmann::json::object();
      tok["t"] = t.text;
      if (t.pos) tok["pos"] = *t.pos;
      tokens.push_back(std::move(tok));
    }
    sentences.push_back(nlohmann::json{{"tokens", std::move(tokens)}});
  }
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : doc.clusters) {
    nlohmann::json spans = nlohmann::json::array();
    for (const auto& m : c) spans.push_back(nlohmann::json::array({m.sentence, m.start, m.end}));
    clusters.push_back(std::move(spans));
  }
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  j["sentences"] = std::move(sentences);
  j["clusters"] = std::move(clusters);
  return j;
}

namespace detail {

[[noreturn]] inline void json_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Parse, where + ": " + what);
}

inline std::size_t json_index(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    json_fail(where, "span index must be a non-negative integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace detail

/// Parses one document object. `where` prefixes error messages.
inline Document document_from_json(const nlohmann::json& j, const std::string& where) {
  using detail::json_fail;
  if (!j.is_object()) json_fail(where, "expected a JSON object");
  Document doc;
  if (!j.contains("doc_id") || !j["doc_id"].is_string()) {
    json_fail(where, "missing string field \"doc_id\"");
  }
  doc.doc_id = j["doc_id"].get<std::string>();
  if (!j.contains("sentences") || !j["sentences"].is_array()) {
    json_fail(where, "missing array field \"sentences\"");
  }
  for (const auto& sj : j["sentences"]) {
    if (!sj.is_object() || !sj.contains("tokens") || !sj["tokens"].is_array()) {
      json_fail(where, "sentence must be an object with a \"tokens\" array");
    }
    Sentence s;
    for (const auto& tj : sj["tokens"]) {
      if (!tj.is_object() || !tj.contains("t") || !tj["t"].is_string()) {
        json_fail(where, "token must be an object with a string \"t\"");
      }
      Token tok{tj["t"].get<std::string>(), {}};
      if (tok.text.empty() || text::has_whitespace(tok.text)) {
        json_fail(where, "token '" + tok.text + "' is empty or contains whitespace");
      }
      if (tj.contains("pos") && !tj["pos"].is_null()) {
        if (!tj["pos"].is_string()) json_fail(where, "\"pos\" must be a string");
        tok.pos = tj["pos"].get<std::string>();
      }
      s.tokens.push_back(std::move(tok));
    }
    if (s.tokens.empty()) json_fail(where, "sentence has no tokens");
    doc.sentences.push_back(std::move(s));
  }
  if (j.contains("clusters")) {
    if (!j["clusters"].is_array()) json_fail(where, "\"clusters\" must be an array");
    for (const auto& cj : j["clusters"]) {
      if (!cj.is_array() || cj.empty()) {
        json_fail(where, "cluster must be a non-empty array of [sent,start,end]");
      }
      Cluster cluster;
      for (const auto& mj : cj) {
        if (!mj.is_array() || mj.size() != 3) {
          json_fail(where, "mention must be a [sent,start,end] triple");
        }
        cluster.push_back({detail::json_index(mj[0], where),
                           detail::json_index(mj[1], where),
                           detail::json_index(mj[2], where)});
      }
      doc.clusters.push_back(std::move(cluster));
    }
  }
  validate(doc);
  return doc;
}

inline Corpus parse_documents(std::string_view data, const std::string& name = "<input>") {
  if (auto bad = text::find_invalid_utf8(data); bad != std::string_view::npos) {
    throw Error(ErrorCode::Encoding,
                name + ": invalid UTF-8 at byte " + std::to_string(bad));
  }
  std::vector<Document> docs;
  const auto all = text::lines(data);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (text::trim(all[i]).empty()) continue;
    const std::string where = name + ":" + std::to_string(i + 1);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(all[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::Parse, where + ": " + e.what());
    }
    docs.push_back(document_from_json(j, where));
  }
  return Corpus::annotated(std::move(docs));
}

inline Corpus read_documents(const std::string& path) {
  return parse_documents(text::read_file(path), path);
}

inline std::string format_documents(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents()) {
    out += to_json(d).dump();
    out += '\n';
  }
  return out;
}

inline void write_documents(const Corpus& corpus, const std::string& path) {
  text::write_file(path, format_documents(corpus));
}

// ---------------------------------------------------------------------------
// CoNLL-lite import.
//
// Token lines carry at least three columns: token, POS, ..., coref tag (last).
// Tags are "-" or '|'-joined parts of the form "(k", "k)" or "(k)". Mentions
// must open and close inside one sentence.

namespace detail {

struct CorefPart {
  bool open = false;
  bool close = false;
  long long id = 0;
};

inline std::optional<std::vector<CorefPart>> parse_coref_tag(std::string_view tag) {
  std::vector<CorefPart> parts;
  if (tag == "-") return parts;
  for (const auto& piece : text::split(tag, '|')) {
    std::string_view p = piece;
    CorefPart part;
    if (!p.empty() && p.front() == '(') {
      part.open = true;
      p.remove_prefix(1);
    }
    if (!p.empty() && p.back() == ')') {
      part.close = true;
      p.remove_suffix(1);
    }
    if (p.empty() || (!part.open && !part.close) || p.size() > 18) return std::nullopt;
    for (char c : p) {
      if (c < '0' || c > '9') return std::nullopt;
    }
    part.id = std::stoll(std::string(p));
    parts.push_back(part);
  }
  return parts;
}

class ConllBuilder {
 public:
  explicit ConllBuilder(std::string doc_id) { doc_.doc_id = std::move(doc_id); }

  void add_token(Token tok, const std::vector<CorefPart>& parts, std::size_t line_no) {
    const std::size_t idx = sentence_.tokens.size();
    sentence_.tokens.push_back(std::move(tok));
    // Opens first so "(k)" and "(k|k)" close on the same token.
    for (const auto& p : parts) {
      if (p.open && !p.close) open_[p.id].push_back(idx);
    }
    for (const auto& p : parts) {
      if (p.open && p.close) {
        add_mention(p.id, idx, idx + 1);
      } else if (p.close) {
        auto it = open_.find(p.id);
        if (it == open_.end() || it->second.empty()) {
          throw Error(ErrorCode::UnbalancedCoref,
                      "document '" + doc_.doc_id + "' cluster " +
                          std::to_string(p.id) + " closed without opening (line " +
                          std::to_string(line_no) + ")");
        }
        const std::size_t start = it->second.back();
        it->second.pop_back();
        add_mention(p.id, start, idx + 1);
      }
    }
  }

  void end_sentence() {
    if (sentence_.tokens.empty()) return;
    for (const auto& [id, stack] : open_) {
      if (!stack.empty()) {
        throw Error(ErrorCode::UnbalancedCoref,
                    "document '" + doc_.doc_id + "' cluster " + std::to_string(id) +
                        " is never closed");
      }
    }
    open_.clear();
    doc_.sentences.push_back(std::move(sentence_));
    sentence_ = {};
  }

  bool has_content() const { return !doc_.sentences.empty() || !sentence_.tokens.empty(); }

  Document finish() {
    end_sentence();
    for (auto& c : clusters_in_order_) {
      std::sort(c.begin(), c.end());
      doc_.clusters.push_back(std::move(c));
    }
    validate(doc_);
    return std::move(doc_);
  }

 private:
  void add_mention(long long id, std::size_t start, std::size_t end) {
    auto [it, inserted] = cluster_index_.emplace(id, clusters_in_order_.size());
    if (inserted) clusters_in_order_.emplace_back();
    clusters_in_order_[it->second].push_back({doc_.sentences.size(), start, end});
  }

  Document doc_;
  Sentence sentence_;
  std::map<long long, std::vector<std::size_t>> open_;
  std::map<long long, std::size_t> cluster_index_;
  std::vector<Cluster> clusters_in_order_;
};

}  // namespace detail

inline Corpus parse_conll_lite(std::string_view data, const std::string& name = "<input>") {
  if (auto bad = text::find_invalid_utf8(data); bad != std::string_view::npos) {
    throw Error(ErrorCode::Encoding,
                name + ": invalid UTF-8 at byte " + std::to_string(bad));
  }
  std::vector<Document> docs;
  std::optional<detail::ConllBuilder> current;
  bool explicit_doc = false;
  auto flush = [&] {
    if (current && (explicit_doc || current->has_content())) docs.push_back(current->finish());
    current.reset();
    explicit_doc = false;
  };
  const auto all = text::lines(data);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = text::trim(all[i]);
    if (line.empty()) {
      if (current) current->end_sentence();
      continue;
    }
    if (line.rfind("#begin document", 0) == 0) {
      flush();
      std::string id(text::trim(line.substr(15)));
      if (id.empty()) id = "doc" + std::to_string(docs.size());
      current.emplace(std::move(id));
      explicit_doc = true;
      continue;
    }
    if (line.rfind("#end document", 0) == 0) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    auto cols = text::split_whitespace(line);
    if (cols.size() < 3) {
      throw Error(ErrorCode::MalformedLine,
                  name + ":" + std::to_string(line_no) + ": expected token, POS and coref columns");
    }
    auto parts = detail::parse_coref_tag(cols.back());
    if (!parts) {
      throw Error(ErrorCode::MalformedLine,
                  name + ":" + std::to_string(line_no) + ": bad coref tag '" + cols.back() + "'");
    }
    if (!current) current.emplace("doc" + std::to_string(docs.size()));
    current->add_token(Token{cols[0], cols[1]}, *parts, line_no);
  }
  flush();
  return Corpus::annotated(std::move(docs));
}

inline Corpus import_conll_lite(const std::string& path) {
  return parse_conll_lite(text::read_file(path), path);
}

}  // namespace cda

#endif  // CDA_CORPUS_HPP
