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

#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "progeq/io.hpp"

using namespace progeq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("progeq_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char *name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("sample records round trip") {
  GenConfig cfg = GenConfig::standard();
  cfg.seed = 5;
  auto corpus = generate_corpus(cfg, 20);
  corpus[3].gen_seq.reset();
  corpus[4].provenance = Provenance::Mined;
  TempDir dir;
  write_samples(dir.file("pairs.jsonl"), corpus);
  auto back = read_samples(dir.file("pairs.jsonl"));
  REQUIRE(back.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(back[i].id == corpus[i].id);
    CHECK(back[i].provenance == corpus[i].provenance);
    CHECK(print_pair(back[i].prog_a, back[i].prog_b) ==
          print_pair(corpus[i].prog_a, corpus[i].prog_b));
    CHECK(back[i].gen_seq == corpus[i].gen_seq);
  }
  Json j = sample_to_json(corpus[3]);
  CHECK_FALSE(j.contains("gen_seq"));
  CHECK(j["provenance"] == "Synthetic");
}

TEST_CASE("malformed records name their position") {
  std::istringstream in("{\"id\": \"a\"}\n\nnot json\n");
  try {
    read_jsonl(in, "x.jsonl");
    FAIL("expected DataError");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("x.jsonl:3") != std::string::npos);
  }
  CHECK_THROWS_AS(sample_from_json(Json{{"id", "a"}}), DataError);
  CHECK_THROWS_AS(sample_from_json(Json{{"id", "a"}, {"prog_a", "s01 === ( +s ;"},
                                        {"prog_b", "s01 === s02 ;"}}),
                  DataError);
  CHECK_THROWS_AS(sample_from_json(Json{{"id", "a"}, {"prog_a", "s01 === s02 ;"},
                                        {"prog_b", "s01 === s02 ;"},
                                        {"gen_seq", {"stm1 Bogus N"}}}),
                  DataError);
  CHECK_THROWS_AS(sample_from_json(Json{{"id", "a"}, {"provenance", "Other"},
                                        {"prog_a", "s01 === s02 ;"},
                                        {"prog_b", "s01 === s02 ;"}}),
                  DataError);
}

TEST_CASE("result records only carry verified proofs") {
  Sample s;
  s.id = "c";
  s.prog_a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  s.prog_b = parse_prefix("s01 === ( +s s03 s02 ) ;");
  ResultRecord good{s, {}, ""};
  good.result.status = ProofResult::Status::Found;
  good.result.proof = {parse_rule("stm1 Commute N")};
  Json j = result_to_json(good);
  CHECK(j["status"] == "Found");
  CHECK(j["verified"] == true);
  CHECK(j["proof_length"] == 1);
  ResultRecord back = result_from_json(j);
  CHECK(back.result.found());
  CHECK(back.result.proof == good.result.proof);

  ResultRecord bad = good;
  bad.result.proof = {parse_rule("stm1 AddZero N")};
  Json jb = result_to_json(bad);
  CHECK(jb["status"] == "Rejected");
  CHECK_FALSE(jb.contains("proof"));
  CHECK_FALSE(result_from_json(jb).result.found());

  // A hand-edited record claiming a bogus proof is refused on read.
  Json forged = j;
  forged["proof"] = {"stm1 AddZero N"};
  CHECK_THROWS_AS(result_from_json(forged), DataError);

  ResultRecord err{s, {}, "transport closed"};
  Json je = result_to_json(err);
  CHECK(je["status"] == "Error");
  CHECK(result_from_json(je).error == "transport closed");

  ResultRecord limit{s, {}, ""};
  limit.result.status = ProofResult::Status::StepLimit;
  CHECK(result_from_json(result_to_json(limit)).result.status == ProofResult::Status::StepLimit);
}

TEST_CASE("generator config json") {
  GenConfig c = GenConfig::standard();
  GenConfig back = gen_config_from_json(gen_config_to_json(c), GenConfig{});
  CHECK(gen_config_to_json(back) == gen_config_to_json(c));

  GenConfig small = gen_config_from_json(Json{{"profile", "small"}, {"seed", 9}});
  CHECK(small.statement_weights == GenConfig::small().statement_weights);
  CHECK(small.seed == 9);

  GenConfig tweaked = gen_config_from_json(
      Json{{"rule_prob", {{"Commute", 0.5}}}, {"limits", {{"max_nodes", 80}}}});
  CHECK(tweaked.prob(RuleName::Commute) == 0.5);
  CHECK(tweaked.prob(RuleName::FactorLeft) == GenConfig::standard().prob(RuleName::FactorLeft));
  CHECK(tweaked.limits.max_nodes == 80);

  CHECK_THROWS_AS(gen_config_from_json(Json{{"sed", 1}}), DataError);
  CHECK_THROWS_AS(gen_config_from_json(Json{{"rule_prob", {{"Bogus", 0.5}}}}), DataError);
  CHECK_THROWS_AS(gen_config_from_json(Json{{"leaf_prob", 3.0}}), DataError);
  CHECK_THROWS_AS(gen_config_from_json(Json{{"leaf_prob", "high"}}), DataError);
  CHECK_THROWS_AS(gen_config_from_json(Json{{"profile", "huge"}}), DataError);
}

TEST_CASE("selection config and token counts json") {
  SelectionConfig c;
  c.rare_threshold = 7;
  SelectionConfig back = selection_config_from_json(selection_config_to_json(c));
  CHECK(back.rare_threshold == 7u);
  CHECK(back.hard_width == 20);
  CHECK(selection_config_from_json(Json{{"length_scale", 10.0}}).inclusion_probability(5) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(selection_config_from_json(Json{{"hard_width", 1}}), DataError);
  CHECK_THROWS_AS(selection_config_from_json(Json{{"width", 1}}), DataError);

  TokenCounts t{{"Nrlrr", 278}, {"stm1", 3}};
  CHECK(token_counts_from_json(token_counts_to_json(t)) == t);
  CHECK_THROWS_AS(token_counts_from_json(Json{{"x", -1}}), DataError);
}

TEST_CASE("training export files") {
  TempDir dir;
  std::vector<StepSample> steps{{"s01 === s02 ; Y s01 === s02 ;", "stm1 Commute N", "a"},
                                {"src2", "stm2 DeleteStm", "a"}};
  std::string prefix = dir.file("train");
  export_training(prefix, steps, {{"a", Provenance::Compiled, 2, "challenging"}});
  CHECK(read_file(prefix + ".src") == "s01 === s02 ; Y s01 === s02 ;\nsrc2\n");
  CHECK(read_file(prefix + ".tgt") == "stm1 Commute N\nstm2 DeleteStm\n");
  auto meta = read_jsonl_file(prefix + ".meta.jsonl");
  REQUIRE(meta.size() == 1);
  CHECK(meta[0]["provenance"] == "Compiled");
  CHECK(meta[0]["criteria"] == "challenging");

  Sample s;
  s.prog_a = parse_prefix("s01 === ( +s s02 s03 ) ;");
  s.prog_b = parse_prefix("s01 === ( +s s03 s02 ) ;");
  s.gen_seq = std::vector<RewriteRule>{parse_rule("stm1 Commute N"), parse_rule("stm1 Commute N"),
                                       parse_rule("stm1 Commute N")};
  export_pair_text(prefix, {s});
  CHECK(read_file(prefix + ".pairs.txt") ==
        "s01 === ( +s s02 s03 ) ; Y s01 === ( +s s03 s02 ) ;\n");
  CHECK(read_file(prefix + ".rules.txt") ==
        "stm1 Commute N ; stm1 Commute N ; stm1 Commute N\n");
  CHECK_THROWS_AS(read_file(dir.file("missing")), DataError);
}
