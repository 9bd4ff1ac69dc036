// Copyright 2026 The progeq Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include <atomic>
#include <thread>

#include "json.hpp"
#include "progeq/policy_bridge.hpp"
#include "progeq/verify.hpp"

using namespace progeq;
using namespace std::chrono_literals;

namespace {

std::string fixture(const char *mode) { return std::string(POLICY_FIXTURE) + " " + mode; }

const char *kPair = "s01 === ( +s s02 s03 ) ; Y s01 === ( +s s03 s02 ) ;";

} // namespace

TEST_CASE("request encoding uses the wire field names") {
  auto j = nlohmann::json::parse(encode_request({7, kPair, 3}));
  CHECK(j["id"] == 7);
  CHECK(j["src"] == kPair);
  CHECK(j["beam"] == 3);
  CHECK(j.size() == 3);
}

TEST_CASE("response decoding") {
  PolicyResponse r = decode_response(
      R"({"id": 4, "proposals": [{"rule": "stm1 Commute N", "score": -3},
          {"rule": "stm2 Nonsense", "score": 0}, {"rule": "stm1 AddZero N", "score": -1},
          {"rule": "stm1 MultOne N", "score": -2}, {"score": 1}]})",
      2);
  CHECK(r.id == 4);
  REQUIRE(r.proposals.size() == 2);
  CHECK(print_rule(r.proposals[0].rule) == "stm1 AddZero N");
  CHECK(print_rule(r.proposals[1].rule) == "stm1 MultOne N");
  CHECK(r.dropped.size() == 2);

  CHECK(decode_response(R"({"id": 1, "proposals": []})", 3).proposals.empty());
  CHECK_THROWS_AS(decode_response("{oops", 3), PolicyError);
  CHECK_THROWS_AS(decode_response(R"({"proposals": []})", 3), PolicyError);
  CHECK_THROWS_AS(decode_response(R"({"id": 1})", 3), PolicyError);
  CHECK_THROWS_AS(decode_response(R"({"id": -1, "proposals": []})", 3), PolicyError);
}

TEST_CASE("echo policy round trip") {
  PolicyGateway gw(fixture("echo"), 5s);
  PolicyResponse r = gw.request(kPair, 3);
  REQUIRE(r.proposals.size() == 1);
  CHECK(print_rule(r.proposals[0].rule) == "stm1 Commute N");
  // Ids are fresh per request.
  CHECK(gw.request(kPair, 3).id != r.id);
}

TEST_CASE("out of order responses reach their requests") {
  PolicyGateway gw(fixture("reorder"), 5s);
  // The fixture echoes the beam as the statement number, so each caller can
  // tell whether it got its own reply.
  std::string got1, got2;
  std::thread t1([&] { got1 = print_rule(gw.request(kPair, 1).proposals.at(0).rule); });
  std::thread t2([&] { got2 = print_rule(gw.request(kPair, 2).proposals.at(0).rule); });
  t1.join();
  t2.join();
  CHECK(got1 == "stm1 Commute N");
  CHECK(got2 == "stm2 Commute N");
}

TEST_CASE("unparseable proposals are dropped with a warning") {
  std::vector<std::string> warnings;
  std::mutex mu;
  PolicyGateway gw(fixture("garbage"), 5s, [&](const std::string &w) {
    std::lock_guard lock(mu);
    warnings.push_back(w);
  });
  PolicyResponse r = gw.request(kPair, 3);
  REQUIRE(r.proposals.size() == 2);
  CHECK(print_rule(r.proposals[0].rule) == "stm1 AddZero Nl");
  CHECK(print_rule(r.proposals[1].rule) == "stm1 Commute N");
  CHECK(gw.dropped_proposals() == 1);
  std::lock_guard lock(mu);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("Frobnicate") != std::string::npos);
}

TEST_CASE("transport failures become policy errors") {
  SUBCASE("timeout") {
    PolicyGateway gw(fixture("silent"), 200ms);
    auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(gw.request(kPair, 3), PolicyError);
    CHECK(std::chrono::steady_clock::now() - start >= 200ms);
  }
  SUBCASE("process exit") {
    PolicyGateway gw(fixture("exit"), 5s);
    CHECK_THROWS_AS(gw.request(kPair, 3), PolicyError);
    CHECK_THROWS_AS(gw.request(kPair, 3), PolicyError);
  }
  SUBCASE("malformed record") {
    PolicyGateway gw(fixture("badjson"), 5s, [](const std::string &) {});
    try {
      gw.request(kPair, 3);
      FAIL("expected PolicyError");
    } catch (const PolicyError &e) {
      CHECK(std::string(e.what()).find("malformed") != std::string::npos);
    }
  }
  SUBCASE("missing command") {
    PolicyGateway gw("/nonexistent/policy-binary 2>/dev/null", 5s);
    CHECK_THROWS_AS(gw.request(kPair, 3), PolicyError);
  }
}

TEST_CASE("external policies go through the same search filters") {
  auto gw = std::make_shared<PolicyGateway>(fixture("heuristic"), 5s);
  Program a = parse_prefix("s04 === ( *s ( +s s01 s02 ) s03 ) ;");
  Program b = parse_prefix("s04 === ( *s s03 ( +s s02 s01 ) ) ;");
  ExternalPolicy ext(gw);
  HeuristicPolicy local;
  SearchConfig cfg;
  ProofResult r1 = prove(a, b, ext, cfg);
  ProofResult r2 = prove(a, b, local, cfg);
  REQUIRE(r1.found());
  CHECK(r1.proof == r2.proof);
  CHECK(verify(a, b, r1.proof).proven());

  // The echo policy only ever proposes an illegal rewrite here, so the
  // search exhausts without inventing a proof.
  auto echo = std::make_shared<PolicyGateway>(fixture("echo"), 5s);
  ExternalPolicy bad(echo);
  Program c = parse_prefix("s01 === ( -s s02 s03 ) ;");
  Program d = parse_prefix("s01 === ( -s s03 s02 ) ;");
  ProofResult r3 = prove(c, d, bad, cfg);
  CHECK_FALSE(r3.found());
  CHECK(r3.status == ProofResult::Status::Exhausted);

  // Concurrent searches over one shared gateway.
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i)
    threads.emplace_back([&] {
      ExternalPolicy p(gw);
      ok += prove(a, b, p, cfg).found();
    });
  for (auto &t : threads)
    t.join();
  CHECK(ok == 4);
}
