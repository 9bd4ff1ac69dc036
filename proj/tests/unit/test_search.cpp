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

#include <map>

#include "progeq/search.hpp"
#include "progeq/verify.hpp"

using namespace progeq;

namespace {

// Proposes a fixed list per program text; unknown programs get nothing.
class ScriptedPolicy : public Policy {
public:
  std::map<std::string, std::vector<std::string>> script;
  int calls = 0;

  std::vector<PolicyProposal> propose(const Program &current, const Program &,
                                      int beam) override {
    ++calls;
    std::vector<PolicyProposal> out;
    auto it = script.find(print_prefix(current));
    if (it == script.end())
      return out;
    double score = 0;
    for (const std::string &r : it->second) {
      if (static_cast<int>(out.size()) == beam)
        break;
      out.push_back({parse_rule(r), score});
      score -= 1;
    }
    return out;
  }
};

class ThrowingPolicy : public Policy {
public:
  std::vector<PolicyProposal> propose(const Program &, const Program &, int) override {
    throw PolicyError("transport closed");
  }
};

std::string apply_text(const std::string &prog, const char *rule) {
  return print_prefix(apply(parse_rule(rule), parse_prefix(prog)).program());
}

} // namespace

TEST_CASE("token distance") {
  Program a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  Program b = parse_prefix("s01 === ( +s s03 s02 ) ;");
  CHECK(distance(a, a) == 0);
  // Commute permutes tokens without changing the multiset.
  CHECK(distance(a, b) == 0);
  // AddZero adds "(", "+s" and "0s".
  Program c = parse_prefix("s01 === ( +s 0s ( +s s02 s03 ) ) ;");
  CHECK(distance(a, c) == 3);
  Program d = parse_prefix("s04 = s05 ; s01 === ( +s s02 s03 ) ;");
  // s04, "=", s05, ";" plus one statement of difference.
  CHECK(distance(a, d) == 5);
}

TEST_CASE("identical programs prove with an empty sequence") {
  Program a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  HeuristicPolicy h;
  ProofResult r = prove(a, a, h, {});
  CHECK(r.found());
  CHECK(r.proof.empty());
  CHECK(r.proof_length() == std::size_t{0});
}

TEST_CASE("replay with one intermediate and one proposal") {
  Program a = parse_prefix("s05 = ( *s s01 s02 ) ; s06 === ( +s s05 ( *s s01 s02 ) ) ;");
  std::vector<RewriteRule> seq{parse_rule("stm2 UseVar s05"), parse_rule("stm2 AddZero Nl"),
                               parse_rule("stm2 Commute N")};
  Program b = verify(a, a, seq, true).intermediates.back();
  ReplayPolicy replay(a, seq);
  SearchConfig cfg;
  cfg.beam = 1;
  cfg.width = 1;
  ProofResult r = prove(a, b, replay, cfg);
  REQUIRE(r.found());
  CHECK(r.proof == seq);
  CHECK(r.states_expanded == 3);
}

TEST_CASE("replay skips loops in the recorded sequence") {
  Program a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  std::vector<RewriteRule> seq{parse_rule("stm1 Commute N"), parse_rule("stm1 Commute N"),
                               parse_rule("stm1 AddZero N")};
  Program b = verify(a, a, seq, true).intermediates.back();
  ReplayPolicy replay(a, seq);
  SearchConfig cfg;
  cfg.beam = 1;
  cfg.width = 1;
  ProofResult r = prove(a, b, replay, cfg);
  REQUIRE(r.found());
  CHECK(r.proof == std::vector<RewriteRule>{parse_rule("stm1 AddZero N")});
}

TEST_CASE("beam search keeps rank-ordered intermediates") {
  // A three step proof where the useful step is the policy's second choice
  // at the first step; B=3, I=2 keeps the first two ranks.
  std::string a = "s04 === ( *s ( +s s01 s02 ) s03 ) ;";
  std::string x1 = apply_text(a, "stm1 MultOne N");
  std::string y1 = apply_text(a, "stm1 DistributeLeft N");
  std::string y2 = apply_text(y1, "stm1 Commute N");
  std::string b = apply_text(y2, "stm1 Commute Nl");
  ScriptedPolicy policy;
  policy.script[a] = {"stm1 MultOne N", "stm1 DistributeLeft N", "stm1 AddZero N"};
  policy.script[x1] = {"stm1 NeutralOp N", "stm1 Commute Nr"};
  policy.script[y1] = {"stm1 Commute N"};
  policy.script[y2] = {"stm1 Commute Nl"};
  SearchConfig cfg;
  cfg.beam = 3;
  cfg.width = 2;
  cfg.record_trace = true;
  ProofResult r = prove(parse_prefix(a), parse_prefix(b), policy, cfg);
  REQUIRE(r.found());
  CHECK(r.proof == std::vector<RewriteRule>{parse_rule("stm1 DistributeLeft N"),
                                            parse_rule("stm1 Commute N"),
                                            parse_rule("stm1 Commute Nl")});
  // Step 1 expands a; step 2 expands x1 and y1; step 3 expands the
  // Commute Nr result of x1 and y2.
  CHECK(r.states_expanded == 5);
  CHECK_FALSE(r.trace.empty());

  // With I=1 only the first-ranked result survives and the proof is lost.
  cfg.width = 1;
  ProofResult narrow = prove(parse_prefix(a), parse_prefix(b), policy, cfg);
  CHECK_FALSE(narrow.found());
}

TEST_CASE("illegal proposals are dropped, never followed") {
  Program a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  Program b = parse_prefix("s01 === ( +s s03 s02 ) ;");
  ScriptedPolicy policy;
  policy.script[print_prefix(a)] = {"stm1 Cancel N", "stm3 Commute N", "stm1 Commute N"};
  SearchConfig cfg;
  ProofResult r = prove(a, b, policy, cfg);
  REQUIRE(r.found());
  CHECK(r.proof.size() == 1);

  ScriptedPolicy useless;
  useless.script[print_prefix(a)] = {"stm1 Cancel N"};
  ProofResult none = prove(a, b, useless, cfg);
  CHECK(none.status == ProofResult::Status::Exhausted);
  CHECK(none.proof.empty());
}

TEST_CASE("heuristic policy") {
  Program a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  Program b = parse_prefix("s01 === ( +s s03 s02 ) ;");
  HeuristicPolicy h;
  auto props = h.propose(a, b, 3);
  REQUIRE(props.size() == 3);
  CHECK(props[0].rule == parse_rule("stm1 Commute N"));
  CHECK(props[0].score == 0);
  CHECK(props[1].score < 0);

  // Asking for more proposals than there are legal rewrites returns them all.
  auto all = h.propose(a, b, 100000);
  CHECK(all.size() == enumerate_legal(a).size());

  ProofResult r = prove(a, b, h, {});
  CHECK(r.found());
  CHECK(r.proof_length() == std::size_t{1});
}

TEST_CASE("search on non-equivalent programs never reports a proof") {
  Program a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  Program b = parse_prefix("s01 === ( -s s02 s03 ) ;");
  HeuristicPolicy h;
  SearchConfig cfg;
  cfg.max_steps = 6;
  ProofResult r = prove(a, b, h, cfg);
  CHECK_FALSE(r.found());
  CHECK(r.status == ProofResult::Status::StepLimit);
  CHECK(r.states_expanded <= static_cast<std::size_t>(cfg.width * cfg.max_steps + 1));

  ProofResult e = exhaustive_prove(a, b, 2);
  CHECK_FALSE(e.found());
}

TEST_CASE("exhaustive search") {
  Program a = parse_prefix("s04 === ( *s ( +s s01 s02 ) s03 ) ;");
  Program b = parse_prefix("s04 === ( +s ( *s s02 s03 ) ( *s s01 s03 ) ) ;");
  ProofResult zero = exhaustive_prove(a, b, 0);
  CHECK(zero.status == ProofResult::Status::Exhausted);
  CHECK_FALSE(zero.found());
  CHECK_FALSE(exhaustive_prove(a, b, 1).found());
  ProofResult two = exhaustive_prove(a, b, 2);
  REQUIRE(two.found());
  CHECK(two.proof.size() == 2);
  CHECK(verify(a, b, two.proof).proven());
}

TEST_CASE("policy errors propagate") {
  Program a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  Program b = parse_prefix("s01 === ( +s s03 s02 ) ;");
  ThrowingPolicy t;
  CHECK_THROWS_AS(prove(a, b, t, {}), PolicyError);
}

TEST_CASE("search config validation and status names") {
  Program a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  HeuristicPolicy h;
  SearchConfig cfg;
  cfg.beam = 0;
  CHECK_THROWS_AS(prove(a, a, h, cfg), std::invalid_argument);
  for (auto s : {ProofResult::Status::Found, ProofResult::Status::Exhausted,
                 ProofResult::Status::StepLimit})
    CHECK(status_from(status_name(s)) == s);
  CHECK_FALSE(status_from("Nope"));
}
