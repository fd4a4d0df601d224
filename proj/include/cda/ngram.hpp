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

#ifndef CDA_NGRAM_HPP
#define CDA_NGRAM_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cda/bias.hpp"
#include "cda/corpus.hpp"
#include "cda/error.hpp"
#include "cda/text.hpp"

namespace cda {

/// Count-based n-gram model with add-k smoothing:
///
///   P(w | ctx) = (count(ctx, w) + k) / (total(ctx) + k * |V|)
///
/// where ctx is the last order-1 tokens of the BOS-padded prefix and V
/// includes the BOS and UNK markers. Case-sensitive.
class NgramModel {
 public:
  using Context = std::vector<std::string>;

  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kUnk = "<unk>";
  static constexpr int kMaxOrder = 5;

  NgramModel() = default;

  /// Tokens seen fewer than `min_count` times become UNK. Throws BadOrder,
  /// EmptyCorpus (no sentences) or ModeMismatch (annotated corpus).
  static NgramModel train(const Corpus& corpus, int order, double k, std::size_t min_count = 1) {
    return train(std::span<const Sentence>(corpus.sentences()), order, k, min_count);
  }

  static NgramModel train(std::span<const Sentence> sentences, int order, double k,
                          std::size_t min_count = 1) {
    if (order < 1 || order > kMaxOrder) {
      throw Error(ErrorCode::BadOrder, "order must be in [1," + std::to_string(kMaxOrder) + "], got " +
                                           std::to_string(order));
    }
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw Error(ErrorCode::Usage, "smoothing constant k must be positive and finite");
    }
    if (sentences.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot train on an empty corpus");

    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& s : sentences) {
      for (const auto& t : s.tokens) ++freq[t.text];
    }

    NgramModel m;
    m.order_ = order;
    m.k_ = k;
    m.vocab_.insert(std::string(kBos));
    m.vocab_.insert(std::string(kUnk));
    for (const auto& [w, n] : freq) {
      if (n >= min_count) m.vocab_.insert(w);
    }
    for (const auto& s : sentences) {
      Context history(static_cast<std::size_t>(order - 1), std::string(kBos));
      for (const auto& t : s.tokens) {
        std::string w = m.map_token(t.text);
        m.add(history, w, 1);
        if (!history.empty()) {
          history.erase(history.begin());
          history.push_back(std::move(w));
        }
      }
    }
    return m;
  }

  int order() const { return order_; }
  double k() const { return k_; }
  const std::set<std::string>& vocab() const { return vocab_; }
  std::size_t vocab_size() const { return vocab_.size(); }

  std::uint64_t count(const Context& ctx, const std::string& w) const {
    auto it = counts_.find(ctx);
    if (it == counts_.end()) return 0;
    auto jt = it->second.find(w);
    return jt == it->second.end() ? 0 : jt->second;
  }

  std::uint64_t total(const Context& ctx) const {
    auto it = totals_.find(ctx);
    return it == totals_.end() ? 0 : it->second;
  }

  /// Contexts with at least one recorded continuation, in sorted order.
  std::vector<Context> contexts() const {
    std::vector<Context> out;
    out.reserve(counts_.size());
    for (const auto& [ctx, _] : counts_) out.push_back(ctx);
    return out;
  }

  /// Out-of-vocabulary tokens map to UNK.
  std::string map_token(std::string_view w) const {
    return vocab_.count(std::string(w)) ? std::string(w) : std::string(kUnk);
  }

  /// The order-1 tokens conditioning the next word after `prefix`.
  Context context_of(std::span<const std::string> prefix) const {
    const std::size_t n = static_cast<std::size_t>(order_ - 1);
    Context ctx(n, std::string(kBos));
    const std::size_t take = std::min(n, prefix.size());
    for (std::size_t i = 0; i < take; ++i) {
      ctx[n - take + i] = map_token(prefix[prefix.size() - take + i]);
    }
    return ctx;
  }

  double log_prob_in_context(const Context& ctx, std::string_view target) const {
    const std::string w = map_token(target);
    const double num = static_cast<double>(count(ctx, w)) + k_;
    const double den = static_cast<double>(total(ctx)) + k_ * static_cast<double>(vocab_.size());
    return std::log(num / den);
  }

  /// ln P(target | prefix); the prefix is taken as the start of a sentence.
  double log_prob(std::span<const std::string> prefix, std::string_view target) const {
    return log_prob_in_context(context_of(prefix), target);
  }

  /// Records one more occurrence of (ctx, w); grows the vocabulary if needed.
  void add(const Context& ctx, const std::string& w, std::uint64_t n) {
    counts_[ctx][w] += n;
    totals_[ctx] += n;
    vocab_.insert(w);
    for (const auto& c : ctx) vocab_.insert(c);
  }

  // -- serialization --------------------------------------------------------

  std::string serialize() const {
    std::string out = "ngramlm v1 " + std::to_string(order_) + " " + format_double(k_) + " " +
                      std::to_string(vocab_.size()) + "\n";
    for (const auto& w : vocab_) out += w + "\n";
    std::vector<std::string> rows;
    for (const auto& [ctx, row] : counts_) {
      const std::string prefix = text::join(ctx, "\t");
      for (const auto& [w, n] : row) rows.push_back(prefix + "\t" + w + "\t" + std::to_string(n));
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& r : rows) out += r + "\n";
    return out;
  }

  static NgramModel deserialize(std::string_view data, const std::string& name = "<model>") {
    const auto all = text::lines(data);
    if (all.empty()) throw Error(ErrorCode::VersionMismatch, name + ": missing 'ngramlm v1' header");
    const auto header = text::split(all[0], ' ');
    if (header.size() < 2 || header[0] != "ngramlm" || header[1] != "v1") {
      throw Error(ErrorCode::VersionMismatch, name + ": expected 'ngramlm v1' header, got '" + all[0] + "'");
    }
    auto fail = [&](std::size_t line, const std::string& why) {
      return Error(ErrorCode::Parse, name + ":" + std::to_string(line) + ": " + why);
    };
    if (header.size() != 5) throw fail(1, "header needs order, k and vocab size");
    NgramModel m;
    std::size_t vocab_size = 0;
    if (!parse_number(header[2], m.order_) || m.order_ < 1 || m.order_ > kMaxOrder) {
      throw fail(1, "bad order '" + header[2] + "'");
    }
    if (!parse_number(header[3], m.k_) || !(m.k_ > 0.0) || !std::isfinite(m.k_)) {
      throw fail(1, "bad k '" + header[3] + "'");
    }
    if (!parse_number(header[4], vocab_size)) throw fail(1, "bad vocab size '" + header[4] + "'");
    if (all.size() < 1 + vocab_size) throw fail(all.size(), "truncated vocabulary");
    for (std::size_t i = 1; i <= vocab_size; ++i) {
      if (all[i].empty() || text::has_whitespace(all[i])) throw fail(i + 1, "bad vocabulary entry");
      if (!m.vocab_.insert(all[i]).second) throw fail(i + 1, "duplicate vocabulary entry");
    }
    if (!m.vocab_.count(std::string(kBos)) || !m.vocab_.count(std::string(kUnk))) {
      throw fail(1, "vocabulary lacks BOS/UNK markers");
    }
    const std::size_t ctx_len = static_cast<std::size_t>(m.order_ - 1);
    const std::size_t fields = (ctx_len == 0 ? 1 : ctx_len) + 2;
    for (std::size_t i = vocab_size + 1; i < all.size(); ++i) {
      const auto cols = text::split(all[i], '\t');
      if (cols.size() != fields) throw fail(i + 1, "expected " + std::to_string(fields) + " tab-separated fields");
      Context ctx;
      if (ctx_len == 0) {
        if (!cols[0].empty()) throw fail(i + 1, "unigram rows have an empty context");
      } else {
        ctx.assign(cols.begin(), cols.begin() + static_cast<long>(ctx_len));
      }
      const std::string& w = cols[fields - 2];
      std::uint64_t n = 0;
      if (!parse_number(cols[fields - 1], n) || n == 0) throw fail(i + 1, "bad count");
      for (const auto& c : ctx) {
        if (!m.vocab_.count(c)) throw fail(i + 1, "context token '" + c + "' not in vocabulary");
      }
      if (!m.vocab_.count(w)) throw fail(i + 1, "token '" + w + "' not in vocabulary");
      if (m.count(ctx, w) != 0) throw fail(i + 1, "duplicate n-gram");
      m.counts_[ctx][w] = n;
      m.totals_[ctx] += n;
    }
    return m;
  }

  void save(const std::string& path) const { text::write_file(path, serialize()); }

  static NgramModel load(const std::string& path) { return deserialize(text::read_file(path), path); }

  friend bool operator==(const NgramModel& a, const NgramModel& b) {
    return a.order_ == b.order_ && a.k_ == b.k_ && a.vocab_ == b.vocab_ && a.counts_ == b.counts_;
  }

 private:
  static std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  }

  template <class N>
  static bool parse_number(std::string_view s, N& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
  }

  int order_ = 1;
  double k_ = 1.0;
  std::set<std::string> vocab_;
  std::map<Context, std::map<std::string, std::uint64_t>> counts_;
  std::map<Context, std::uint64_t> totals_;
};

/// NextWord scorer over an n-gram model. CorefPair requests are rejected.
class NgramScorer : public Scorer {
 public:
  explicit NgramScorer(NgramModel model) : model_(std::move(model)) {}

  double score(const ScoreRequest& request) override {
    if (request.kind != ScoreKind::NextWord) {
      throw ScorerError(ErrorCode::UnsupportedKind, "n-gram scorer only answers lm requests");
    }
    return model_.log_prob(request.prefix(), request.target);
  }

  bool supports(ScoreKind kind) const override { return kind == ScoreKind::NextWord; }
  bool concurrent_safe() const override { return true; }

  const NgramModel& model() const { return model_; }

 private:
  NgramModel model_;
};

inline NgramScorer as_scorer(NgramModel model) { return NgramScorer(std::move(model)); }

}  // namespace cda

#endif  // CDA_NGRAM_HPP
