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
#include <signal.h>

#include <chrono>
#include <string>

#include "cda/bridge.hpp"
#include "test_util.hpp"

#ifndef CDA_BRIDGE_CHILD
#define CDA_BRIDGE_CHILD "bridge_child"
#endif

namespace cda {
namespace {

using std::chrono::milliseconds;

BridgeConfig child(const std::string& mode, milliseconds timeout = milliseconds(5000)) {
  BridgeConfig c;
  c.command = {CDA_BRIDGE_CHILD, mode};
  c.timeout = timeout;
  return c;
}

ScoreRequest lm_request(std::size_t n = 3) {
  ScoreRequest r;
  r.kind = ScoreKind::NextWord;
  r.tokens = {"He", "is", "a", "doctor"};
  r.prefix_len = n;
  r.target = "doctor";
  return r;
}

ErrorCode detail_of(BridgeScorer& s, const ScoreRequest& r) {
  try {
    s.score(r);
  } catch (const ScorerError& e) {
    return e.detail();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Io;
}

TEST(BridgeTest, RequestJson) {
  const auto lm = bridge_request_json(lm_request(), 7);
  EXPECT_EQ(lm.dump(), R"({"id":7,"kind":"lm","prefix_len":3,"target":"doctor","tokens":["He","is","a","doctor"]})");
  ScoreRequest c;
  c.tokens = {"The", "doctor", "ran", "because", "he"};
  c.mention_a = {1, 2};
  c.mention_b = {4, 5};
  const auto coref = bridge_request_json(c, 1);
  EXPECT_EQ(coref.at("kind"), "coref");
  EXPECT_EQ(coref.at("mention_a"), nlohmann::json::array({1, 2}));
  EXPECT_EQ(coref.at("mention_b"), nlohmann::json::array({4, 5}));
  EXPECT_FALSE(coref.contains("target"));
}

TEST(BridgeTest, SequentialRequests) {
  BridgeScorer s(child("echo"));
  EXPECT_FALSE(s.running());
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(s.score(lm_request()), 0.0) << i;
  EXPECT_TRUE(s.running());
  EXPECT_EQ(s.requests_sent(), 1000u);
}

TEST(BridgeTest, ScoresReflectRequest) {
  BridgeScorer s(child("count"));
  EXPECT_EQ(s.score(lm_request(2)), 4.5);
  ScoreRequest c;
  c.tokens = {"a", "b", "c"};
  EXPECT_EQ(s.score(c), 3.0);
}

TEST(BridgeTest, BitExactScores) {
  BridgeScorer s(child("exact"));
  const double got = s.score(lm_request());
  EXPECT_EQ(got, 0.1 + 0.2);
  EXPECT_NE(got, 0.3);
}

TEST(BridgeTest, WrongId) {
  BridgeScorer s(child("wrong-id"));
  EXPECT_EQ(detail_of(s, lm_request()), ErrorCode::ProtocolError);
  EXPECT_FALSE(s.running());
}

TEST(BridgeTest, Malformed) {
  BridgeScorer s(child("malformed"));
  EXPECT_EQ(detail_of(s, lm_request()), ErrorCode::ProtocolError);
}

TEST(BridgeTest, Timeout) {
  BridgeScorer s(child("silent", milliseconds(200)));
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(detail_of(s, lm_request()), ErrorCode::Timeout);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(2));
  EXPECT_FALSE(s.running());
}

TEST(BridgeTest, ForcedKillAfterGrace) {
  auto cfg = child("stubborn", milliseconds(100));
  cfg.kill_grace = milliseconds(200);
  BridgeScorer s(cfg);
  EXPECT_EQ(detail_of(s, lm_request()), ErrorCode::Timeout);
  EXPECT_FALSE(s.running());
}

TEST(BridgeTest, ChildErrorKeepsChild) {
  BridgeScorer s(child("error"));
  try {
    s.score(lm_request());
    FAIL();
  } catch (const ScorerError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScorerFailure);
    EXPECT_EQ(e.detail(), ErrorCode::ChildError);
    EXPECT_NE(std::string(e.what()).find("model exploded"), std::string::npos);
  }
  EXPECT_TRUE(s.running());
  EXPECT_EQ(detail_of(s, lm_request()), ErrorCode::ChildError);
}

TEST(BridgeTest, ChildExit) {
  BridgeScorer s(child("die"));
  EXPECT_EQ(detail_of(s, lm_request()), ErrorCode::ProtocolError);
}

TEST(BridgeTest, SpawnError) {
  BridgeConfig cfg;
  cfg.command = {"/nonexistent/scorer"};
  BridgeScorer s(cfg);
  EXPECT_EQ(detail_of(s, lm_request()), ErrorCode::SpawnError);
  EXPECT_FALSE(s.running());
}

TEST(BridgeTest, RespawnsAfterFailure) {
  BridgeScorer s(child("silent", milliseconds(100)));
  EXPECT_EQ(detail_of(s, lm_request()), ErrorCode::Timeout);
  EXPECT_EQ(detail_of(s, lm_request()), ErrorCode::Timeout);
  EXPECT_EQ(s.requests_sent(), 2u);
}

TEST(BridgeTest, ChildIsReapedOnDestruction) {
  pid_t pid;
  {
    BridgeScorer s(child("echo"));
    s.score(lm_request());
    pid = s.pid();
    ASSERT_GT(pid, 0);
  }
  EXPECT_EQ(::kill(pid, 0), -1);
}

TEST(BridgeTest, Config) {
  EXPECT_THROW(BridgeScorer(BridgeConfig{}), Error);
  auto cfg = child("echo", milliseconds(0));
  EXPECT_THROW(BridgeScorer{cfg}, Error);
  EXPECT_FALSE(BridgeScorer(child("echo")).concurrent_safe());
}

TEST(BridgeTest, DrivesBiasReport) {
  auto s = bridge_scorer(child("count"));
  const auto lm = default_lm_templates();
  const std::vector<std::string> occ{"doctor", "nurse"};
  const auto r = occupation_bias_report(std::span<const LmTemplate>(lm), std::span<const std::string>(occ),
                                        default_lexicon(), *s);
  // "The man is a" and "the woman is a" differ only in the swapped word.
  EXPECT_EQ(r.aob, 0.0);
  EXPECT_EQ(s->requests_sent(), 16u);
}

}  // namespace
}  // namespace cda
