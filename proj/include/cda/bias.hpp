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

#ifndef CDA_BIAS_HPP
#define CDA_BIAS_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "cda/error.hpp"
#include "cda/intervention.hpp"
#include "cda/lexicon.hpp"
#include "cda/templates.hpp"
#include "cda/text.hpp"
#include "json.hpp"

namespace cda {

enum class ScoreKind { CorefPair, NextWord };

constexpr std::string_view to_string(ScoreKind kind) {
  return kind == ScoreKind::CorefPair ? "coref" : "lm";
}

/// What a scorer is asked to score. For NextWord, `tokens` holds the prefix
/// followed by the target, and `prefix_len` marks the split.
struct ScoreRequest {
  ScoreKind kind = ScoreKind::CorefPair;
  std::vector<std::string> tokens;
  TokenRange mention_a;
  TokenRange mention_b;
  std::size_t prefix_len = 0;
  std::string target;

  std::span<const std::string> prefix() const {
    return std::span<const std::string>(tokens).first(std::min(prefix_len, tokens.size()));
  }

  friend bool operator==(const ScoreRequest&, const ScoreRequest&) = default;
};

inline ScoreRequest make_request(const TemplateInstance& inst) {
  ScoreRequest req;
  req.tokens = inst.text.words();
  if (const auto* c = std::get_if<CorefTarget>(&inst.target)) {
    req.kind = ScoreKind::CorefPair;
    req.mention_a = c->mention_a;
    req.mention_b = c->mention_b;
  } else {
    const auto& nw = std::get<NextWordTarget>(inst.target);
    req.kind = ScoreKind::NextWord;
    req.prefix_len = nw.prefix_len;
    req.target = nw.target;
  }
  return req;
}

/// Key used by table scorers:
///   coref:<tokens>:<a.start>-<a.end>,<b.start>-<b.end>
///   lm:<prefix tokens>:<target>
inline std::string canonical_key(const ScoreRequest& req) {
  std::string key(to_string(req.kind));
  key += ':';
  if (req.kind == ScoreKind::CorefPair) {
    key += text::join(req.tokens, " ");
    key += ':';
    key += std::to_string(req.mention_a.start) + "-" + std::to_string(req.mention_a.end) + "," +
           std::to_string(req.mention_b.start) + "-" + std::to_string(req.mention_b.end);
  } else {
    key += text::join(req.prefix(), " ");
    key += ':';
    key += req.target;
  }
  return key;
}

/// A scoring function s. Implementations throw ScorerError on failure.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual double score(const ScoreRequest& request) = 0;

  virtual bool supports(ScoreKind) const { return true; }

  // Whether score() may be called from several threads at once.
  virtual bool concurrent_safe() const { return false; }
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Mean of s(a) - s(b) over the pairs (a, b).
template <class T, class ScoreFn>
  requires std::invocable<ScoreFn&, const T&>
double score_bias(const MatchedPairSet<T>& set, ScoreFn&& score) {
  if (set.empty()) throw Error(ErrorCode::EmptySet, "score bias of an empty pair set");
  CompensatedSum sum;
  for (const auto& p : set) sum.add(score(p.original) - score(p.intervened));
  return sum.value() / static_cast<double>(set.size());
}

/// Scores an instance, normalizing any non-scorer exception to ScorerError.
inline double score_instance(Scorer& scorer, const TemplateInstance& inst) {
  const ScoreRequest req = make_request(inst);
  try {
    return scorer.score(req);
  } catch (const ScorerError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScorerError(ErrorCode::ScorerFailure, e.what());
  }
}

inline double score_bias(const InstancePairSet& set, Scorer& scorer) {
  return score_bias(set, [&](const TemplateInstance& inst) { return score_instance(scorer, inst); });
}

/// Mean of |score_bias| over the class members.
template <class T, class ScoreFn>
  requires std::invocable<ScoreFn&, const T&>
double class_bias(std::span<const MatchedPairSet<T>> members, ScoreFn&& score) {
  if (members.empty()) throw Error(ErrorCode::EmptySet, "class bias of an empty class");
  CompensatedSum sum;
  for (const auto& m : members) sum.add(std::abs(score_bias(m, score)));
  return sum.value() / static_cast<double>(members.size());
}

inline double class_bias(std::span<const InstancePairSet> members, Scorer& scorer) {
  return class_bias(members, [&](const TemplateInstance& inst) { return score_instance(scorer, inst); });
}

struct BiasReport {
  std::map<std::string, double> per_occupation;
  double aob = 0.0;
  double signed_aob = 0.0;
  std::size_t pairs_per_occupation = 0;

  nlohmann::json to_json() const {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [occ, b] : per_occupation) per[occ] = b;
    nlohmann::json j;
    j["per_occupation"] = std::move(per);
    j["aob"] = aob;
    j["signed_aob"] = signed_aob;
    j["pairs_per_occupation"] = pairs_per_occupation;
    return j;
  }

  static BiasReport from_json(const nlohmann::json& j) {
    BiasReport r;
    try {
      for (const auto& [occ, b] : j.at("per_occupation").items()) r.per_occupation[occ] = b.get<double>();
      r.aob = j.at("aob").get<double>();
      r.signed_aob = j.at("signed_aob").get<double>();
      r.pairs_per_occupation = j.at("pairs_per_occupation").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Parse, std::string("bias report: ") + e.what());
    }
    return r;
  }

  /// Aligned two-column table, highest signed bias first.
  std::string render_text() const {
    std::vector<std::pair<std::string, double>> rows(per_occupation.begin(), per_occupation.end());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::size_t width = std::string_view("occupation").size();
    for (const auto& r : rows) width = std::max(width, r.first.size());
    auto line = [&](std::string_view name, double v) {
      char num[64];
      std::snprintf(num, sizeof num, "%+.9f", v);
      std::string s(name);
      s.append(width - name.size() + 2, ' ');
      s += num;
      s += '\n';
      return s;
    };
    std::string out = "occupation";
    out.append(width - out.size() + 2, ' ');
    out += "bias\n";
    for (const auto& [name, v] : rows) out += line(name, v);
    char buf[128];
    std::snprintf(buf, sizeof buf, "\nAOB         %.9f\nsigned AOB  %+.9f\npairs per occupation  %zu\n",
                  aob, signed_aob, pairs_per_occupation);
    out += buf;
    return out;
  }
};

/// Per-occupation score bias plus absolute and signed aggregates, computed
/// over an already-built occupation class.
template <class ScoreFn>
BiasReport bias_report(std::span<const OccupationPairs> cls, ScoreFn&& score) {
  if (cls.empty()) throw Error(ErrorCode::EmptySet, "no occupations to evaluate");
  BiasReport report;
  CompensatedSum abs_sum, signed_sum;
  std::size_t counted = 0;
  for (const auto& entry : cls) {
    if (report.per_occupation.count(entry.occupation)) continue;
    const double b = score_bias(entry.pairs, score);
    report.per_occupation[entry.occupation] = b;
    abs_sum.add(std::abs(b));
    signed_sum.add(b);
    ++counted;
    report.pairs_per_occupation = entry.pairs.size();
  }
  report.aob = abs_sum.value() / static_cast<double>(counted);
  report.signed_aob = signed_sum.value() / static_cast<double>(counted);
  return report;
}

template <class Template>
BiasReport occupation_bias_report(std::span<const Template> templates,
                                  std::span<const std::string> occupations, const Lexicon& lexicon,
                                  Scorer& scorer, const TemplateOptions& options = {}) {
  const auto cls = occupation_class(templates, occupations, lexicon, options);
  return bias_report(std::span<const OccupationPairs>(cls),
                     [&](const TemplateInstance& inst) { return score_instance(scorer, inst); });
}

// ---------------------------------------------------------------------------

/// Scores looked up by canonical key. Read-only, so safe to share.
class TableScorer : public Scorer {
 public:
  TableScorer() = default;
  explicit TableScorer(std::unordered_map<std::string, double> table) : table_(std::move(table)) {}

  /// Parses `key<TAB>score` rows. Blank and '#' lines are skipped; the key
  /// is everything before the last tab.
  static TableScorer parse(std::string_view data, const std::string& name = "<table>") {
    std::unordered_map<std::string, double> table;
    const auto all = text::lines(data);
    for (std::size_t i = 0; i < all.size(); ++i) {
      const std::string& line = all[i];
      if (text::trim(line).empty() || line.front() == '#') continue;
      const std::string where = name + ":" + std::to_string(i + 1);
      const auto tab = line.rfind('\t');
      if (tab == std::string::npos || tab == 0) {
        throw Error(ErrorCode::Parse, where + ": expected key<TAB>score");
      }
      std::string_view num = text::trim(std::string_view(line).substr(tab + 1));
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
      if (ec != std::errc() || ptr != num.data() + num.size() || num.empty() || !std::isfinite(value)) {
        throw Error(ErrorCode::Parse, where + ": bad score '" + std::string(num) + "'");
      }
      std::string key = line.substr(0, tab);
      if (!table.emplace(key, value).second) {
        throw Error(ErrorCode::DuplicateKey, where + ": duplicate key '" + key + "'");
      }
    }
    return TableScorer(std::move(table));
  }

  static TableScorer from_file(const std::string& path) { return parse(text::read_file(path), path); }

  double score(const ScoreRequest& request) override {
    const std::string key = canonical_key(request);
    auto it = table_.find(key);
    if (it == table_.end()) throw ScorerError(ErrorCode::MissingScore, "no score for '" + key + "'");
    return it->second;
  }

  bool concurrent_safe() const override { return true; }

  const std::unordered_map<std::string, double>& table() const { return table_; }

 private:
  std::unordered_map<std::string, double> table_;
};

inline TableScorer table_scorer(const std::string& path) { return TableScorer::from_file(path); }

}  // namespace cda

#endif  // CDA_BIAS_HPP
