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

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "cda/ngram.hpp"
#include "test_util.hpp"

namespace cda {
namespace {

using Ctx = NgramModel::Context;

Corpus corpus(std::initializer_list<const char*> lines) {
  std::vector<Sentence> s;
  for (const char* l : lines) s.push_back(make_sentence(l));
  return Corpus::plain(std::move(s));
}

std::vector<std::string> words(const std::string& s) { return text::split_whitespace(s); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

TEST(NgramTrainTest, Counts) {
  const auto m = NgramModel::train(corpus({"a b", "a b"}), 2, 1.0);
  EXPECT_EQ(m.count({"a"}, "b"), 2u);
  EXPECT_EQ(m.count({"<s>"}, "a"), 2u);
  EXPECT_EQ(m.total({"a"}), 2u);
  EXPECT_EQ(m.vocab_size(), 4u);
}

TEST(NgramTrainTest, Contexts) {
  const auto m = NgramModel::train(corpus({"a b c"}), 2, 1.0);
  EXPECT_EQ(m.contexts(), (std::vector<Ctx>{{"<s>"}, {"a"}, {"b"}}));
  const auto tri = NgramModel::train(corpus({"a b c"}), 3, 1.0);
  EXPECT_EQ(tri.count({"<s>", "<s>"}, "a"), 1u);
  EXPECT_EQ(tri.count({"<s>", "a"}, "b"), 1u);
  EXPECT_EQ(tri.count({"a", "b"}, "c"), 1u);
}

TEST(NgramTrainTest, Errors) {
  EXPECT_EQ(code_of([] { NgramModel::train(Corpus::plain({}), 2, 1.0); }), ErrorCode::EmptyCorpus);
  EXPECT_EQ(code_of([] { NgramModel::train(corpus({"a"}), 0, 1.0); }), ErrorCode::BadOrder);
  EXPECT_EQ(code_of([] { NgramModel::train(corpus({"a"}), 6, 1.0); }), ErrorCode::BadOrder);
  EXPECT_EQ(code_of([] { NgramModel::train(corpus({"a"}), 2, 0.0); }), ErrorCode::Usage);
  EXPECT_EQ(code_of([] { NgramModel::train(Corpus::annotated({}), 2, 1.0); }), ErrorCode::ModeMismatch);
}

TEST(NgramProbTest, HandComputedValues) {
  const auto m = NgramModel::train(corpus({"a b"}), 2, 1.0);
  EXPECT_DOUBLE_EQ(m.log_prob(words("a"), "b"), std::log(2.0 / 5.0));
  // Unseen context falls back to the uniform distribution.
  EXPECT_DOUBLE_EQ(m.log_prob(words("b"), "a"), -std::log(4.0));
}

TEST(NgramProbTest, CountTableOracle) {
  // Exact fractions from tests/oracles/ngram_oracle.py, k = 1/2, |V| = 8.
  const auto m = NgramModel::train(corpus({"the cat sat", "the dog sat", "a cat ran"}), 2, 0.5);
  ASSERT_EQ(m.vocab_size(), 8u);
  struct Case {
    const char* prefix;
    const char* target;
    double p;
  };
  for (const auto& c : {Case{"", "the", 5.0 / 14}, Case{"the", "cat", 1.0 / 4}, Case{"the", "ran", 1.0 / 12},
                        Case{"dog", "sat", 3.0 / 10}, Case{"sat", "sat", 1.0 / 8}, Case{"a", "zebra", 1.0 / 10},
                        Case{"zebra", "cat", 1.0 / 8}, Case{"", "a", 3.0 / 14}}) {
    EXPECT_NEAR(m.log_prob(words(c.prefix), c.target), std::log(c.p), 1e-12) << c.prefix << " " << c.target;
  }
  // Longer prefixes only use the last token.
  EXPECT_EQ(m.log_prob(words("a cat the"), "cat"), m.log_prob(words("the"), "cat"));
}

TEST(NgramProbTest, Normalization) {
  testing::SentenceGenerator gen(17);
  std::vector<Sentence> sents;
  for (int i = 0; i < 300; ++i) sents.push_back(gen.sentence());
  for (int order = 1; order <= 4; ++order) {
    const auto m = NgramModel::train(std::span<const Sentence>(sents), order, gen.uniform(0.01, 2.0));
    const std::vector<std::string> vocab(m.vocab().begin(), m.vocab().end());
    const auto seen = m.contexts();
    for (int i = 0; i < 250; ++i) {
      Ctx ctx;
      if (i % 2 == 0) {
        ctx = seen[static_cast<std::size_t>(gen.pick(0, static_cast<int>(seen.size()) - 1))];
      } else {
        for (int j = 0; j < order - 1; ++j) {
          ctx.push_back(vocab[static_cast<std::size_t>(gen.pick(0, static_cast<int>(vocab.size()) - 1))]);
        }
      }
      double sum = 0.0;
      for (const auto& w : vocab) {
        const double lp = m.log_prob_in_context(ctx, w);
        ASSERT_LT(lp, 0.0);
        ASSERT_TRUE(std::isfinite(lp));
        sum += std::exp(lp);
      }
      ASSERT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

TEST(NgramProbTest, Monotonicity) {
  auto m = NgramModel::train(corpus({"the cat sat", "a dog ran"}), 2, 1.0);
  const double before = m.log_prob(words("the"), "dog");
  m.add({"the"}, "dog", 1);
  EXPECT_GT(m.log_prob(words("the"), "dog"), before);
}

TEST(NgramProbTest, MinCountMapsRareTokensToUnk) {
  const auto m = NgramModel::train(corpus({"a b", "a c"}), 2, 1.0, 2);
  EXPECT_EQ(m.vocab(), (std::set<std::string>{"<s>", "<unk>", "a"}));
  EXPECT_EQ(m.count({"a"}, "<unk>"), 2u);
  EXPECT_EQ(m.log_prob(words("a"), "b"), m.log_prob(words("a"), "zzz"));
}

TEST(NgramScorerTest, Kinds) {
  auto scorer = as_scorer(NgramModel::train(corpus({"He is a doctor", "he is a nurse"}), 3, 1.0));
  ScoreRequest lm;
  lm.kind = ScoreKind::NextWord;
  lm.tokens = words("He is a doctor");
  lm.prefix_len = 3;
  lm.target = "doctor";
  EXPECT_DOUBLE_EQ(scorer.score(lm), scorer.model().log_prob(words("He is a"), "doctor"));

  ScoreRequest coref;
  try {
    scorer.score(coref);
    FAIL();
  } catch (const ScorerError& e) {
    EXPECT_EQ(e.detail(), ErrorCode::UnsupportedKind);
  }
  EXPECT_FALSE(scorer.supports(ScoreKind::CorefPair));
}

TEST(NgramScorerTest, CaseSensitive) {
  const auto m = NgramModel::train(corpus({"He ran", "He ran", "he sat"}), 2, 1.0);
  EXPECT_NE(m.log_prob(words("He"), "ran"), m.log_prob(words("he"), "ran"));
  EXPECT_TRUE(m.vocab().count("He"));
  EXPECT_TRUE(m.vocab().count("he"));
}

TEST(NgramIoTest, RoundTrip) {
  testing::SentenceGenerator gen(23);
  std::vector<Sentence> sents;
  for (int i = 0; i < 100; ++i) sents.push_back(gen.sentence());
  testing::TempDir dir;
  for (int order = 1; order <= 3; ++order) {
    const auto m = NgramModel::train(std::span<const Sentence>(sents), order, 0.1 * order);
    const auto path = dir.file("m" + std::to_string(order) + ".lm");
    m.save(path);
    const auto back = NgramModel::load(path);
    EXPECT_EQ(back, m);
    const std::vector<std::string> vocab(m.vocab().begin(), m.vocab().end());
    for (int q = 0; q < 100; ++q) {
      std::vector<std::string> prefix;
      for (int j = gen.pick(0, 4); j > 0; --j) prefix.push_back(gen.token().text);
      const auto& w = vocab[static_cast<std::size_t>(gen.pick(0, static_cast<int>(vocab.size()) - 1))];
      ASSERT_EQ(back.log_prob(prefix, w), m.log_prob(prefix, w));
    }
    EXPECT_EQ(back.serialize(), m.serialize());
  }
}

TEST(NgramIoTest, Format) {
  const auto m = NgramModel::train(corpus({"b a", "a b"}), 2, 0.5);
  EXPECT_EQ(m.serialize(),
            "ngramlm v1 2 0.5 4\n<s>\n<unk>\na\nb\n"
            "<s>\ta\t1\n<s>\tb\t1\na\tb\t1\nb\ta\t1\n");
  EXPECT_EQ(NgramModel::train(corpus({"b a", "a b"}), 2, 0.5).serialize(), m.serialize());
  const auto uni = NgramModel::train(corpus({"a"}), 1, 1.0);
  EXPECT_EQ(uni.serialize(), "ngramlm v1 1 1 3\n<s>\n<unk>\na\n\ta\t1\n");
  EXPECT_EQ(NgramModel::deserialize(uni.serialize()), uni);
}

TEST(NgramIoTest, Errors) {
  EXPECT_EQ(code_of([] { NgramModel::deserialize("ngramlm v2 2 1 2\n<s>\n<unk>\n"); }), ErrorCode::VersionMismatch);
  EXPECT_EQ(code_of([] { NgramModel::deserialize("garbage\n"); }), ErrorCode::VersionMismatch);
  EXPECT_EQ(code_of([] { NgramModel::deserialize(""); }), ErrorCode::VersionMismatch);
  EXPECT_EQ(code_of([] { NgramModel::deserialize("ngramlm v1 2 1 3\n<s>\n<unk>\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { NgramModel::deserialize("ngramlm v1 2 1 2\n<s>\n<unk>\n<s>\tx\t1\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { NgramModel::deserialize("ngramlm v1 9 1 2\n<s>\n<unk>\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { NgramModel::load("/nonexistent/model.lm"); }), ErrorCode::Io);
}

TEST(NgramSymmetryTest, AugmentedCorpusHasNoBias) {
  const Lexicon& lex = default_lexicon();
  testing::SentenceGenerator gen(31);
  std::vector<Sentence> sents;
  for (int i = 0; i < 200; ++i) sents.push_back(gen.sentence());
  for (const char* s : {"He is a doctor .", "the man is a nurse", "She is an engineer"}) {
    sents.push_back(make_sentence(s));
  }
  const Corpus augmented = cda_augment(Corpus::plain(sents), Intervention::naive(lex));
  const auto lm = default_lm_templates();
  for (int order = 1; order <= 5; ++order) {
    auto scorer = as_scorer(NgramModel::train(augmented, order, 1.0));
    const auto r = occupation_bias_report(std::span<const LmTemplate>(lm),
                                          std::span<const std::string>(lex.occupations()), lex, scorer);
    EXPECT_LE(r.aob, 1e-9) << "order " << order;
  }
}

}  // namespace
}  // namespace cda
