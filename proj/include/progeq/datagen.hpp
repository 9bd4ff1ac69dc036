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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "progeq/normalized.hpp"
#include "progeq/program.hpp"
#include "progeq/random.hpp"
#include "progeq/rule.hpp"

namespace progeq {

class GenerationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Provenance { Synthetic, Compiled, Mined };

std::string_view provenance_name(Provenance p);
std::optional<Provenance> provenance_from(std::string_view s);

struct Sample {
  std::string id;
  Program prog_a;
  Program prog_b;
  std::optional<std::vector<RewriteRule>> gen_seq;
  Provenance provenance = Provenance::Synthetic;
};

struct GenConfig {
  std::uint64_t seed = 0;

  // Program shape. Weights are indexed from 1 (entry 0 is unused).
  std::vector<double> statement_weights;
  std::vector<double> depth_weights;
  double two_outputs_prob = 0.45;
  int fixed_outputs = 0; // when > 0, every program has exactly this many
  int min_nodes = 0;
  double vector_output_prob = 0.35;
  // Share of new definitions placed immediately before their first reader
  // instead of anywhere earlier.
  double late_definition_prob = 0.5;

  // Expression grammar.
  double leaf_prob = 0.2;         // below the statement's target depth
  double constant_prob = 0.04;    // per leaf
  double reuse_var_prob = 0.55;   // leaf reads an existing input when possible
  double function_prob = 0.12;    // per operator node
  // +s -s *s /s ns
  std::array<double, 5> scalar_op_weights{3, 2, 3, 1.5, 0.7};
  // +v -v nv *sv
  std::array<double, 4> vector_op_weights{3, 2, 0.7, 3};
  double vector_subexpr_prob = 0.25;
  double duplicate_prob = 0.06;   // Cancel/Factor-shaped subtrees
  double copy_subtree_prob = 0.15; // definition copies a later subtree

  // Probability of applying a rule at an eligible location during one
  // Rules pass.
  std::array<double, kNumRules> rule_prob{};
  // Per-pair multiplier on the rule probabilities, drawn log-normally;
  // Commute and the Factor rules are not scaled.
  double intensity_sigma = 1.0;
  double intensity_mu = 0.0;
  int passes = 3;
  // Pairs whose sequence is shorter are regenerated.
  int min_steps = 1;

  Limits limits{};
  int max_retries = 50;

  static GenConfig standard();
  // Few statements and shallow expressions; used where exhaustive search
  // has to stay cheap.
  static GenConfig small();
  // Three outputs and 101 to 120 nodes.
  static GenConfig generalization();

  void set_rule_prob(RuleName r, double p) { rule_prob[static_cast<int>(r)] = p; }
  double prob(RuleName r) const { return rule_prob[static_cast<int>(r)]; }
  // Empty when the config is usable, else a description of the problem.
  std::optional<std::string> validate() const;
};

// A random well-formed program built from the output statements backwards.
// Retries up to cfg.max_retries times to satisfy cfg.limits.
Program generate_prog_a(const GenConfig &cfg, std::uint64_t seed);

// One pass over the statements and their nodes, applying each rule with its
// configured probability (times `intensity` for the scaled rules). At most
// one node rule fires per node. Returns the new program and the rules
// applied, in order.
struct RulesResult {
  Program program;
  std::vector<RewriteRule> seq;
};
RulesResult apply_random_rules(const Program &p, const GenConfig &cfg, Rng &rng,
                               double intensity = 1.0);
RulesResult apply_random_rules(const Program &p, const GenConfig &cfg,
                               std::uint64_t seed, double intensity = 1.0);

// ProgA plus `cfg.passes` Rules passes. Regenerates (up to max_retries) when
// the pair breaks the limits.
Sample generate_pair(const GenConfig &cfg, std::uint64_t seed);

// count pairs with ids "<prefix>NNNNNN", seeds derived from cfg.seed.
std::vector<Sample> generate_corpus(const GenConfig &cfg, std::size_t count,
                                    std::string_view id_prefix = "r", int jobs = 1);

// Compiler-pass chain over one source program: common subexpression
// elimination, neutral/absorbing element canonicalization, variable reuse
// and a final Rules pass. Stages without an opportunity are skipped. Pairs
// are adjacent stages and (original, final), each in both directions;
// forward pairs carry the stage's rewrite sequence. Each pair is renamed
// with its own random variable assignment.
struct CompiledChain {
  std::vector<Program> stages;                 // original first
  std::vector<std::vector<RewriteRule>> steps; // steps[i]: stages[i] -> stages[i+1]
  std::vector<std::string> stage_names;        // names of stages[1..]
};
CompiledChain compile_chain(const Program &p, const GenConfig &cfg, std::uint64_t seed);
std::vector<Sample> compile_pairs(const Program &p, const GenConfig &cfg,
                                  std::uint64_t seed, std::string_view id_prefix = "k");

// Applies `ren` to both programs and to the variable operands of gen_seq.
Sample rename_sample(const Sample &s, const Renaming &ren);

// Individual passes, exposed for testing. Each returns the rewrite sequence
// taking `p` to the optimized program (empty when nothing applies).
std::vector<RewriteRule> cse_pass(const Program &p);
std::vector<RewriteRule> strength_pass(const Program &p);
std::vector<RewriteRule> reuse_pass(const Program &p);

// Snippets of normalized source, one per line. Keeps those with at least two
// assignments, a multiply or divide, and a temporary that feeds an output;
// duplicates (by canonical tokens) are dropped.
struct SourceSnippet {
  std::size_t line = 0;
  Program program;
};
struct SourceScan {
  std::vector<SourceSnippet> accepted;
  std::vector<std::pair<std::size_t, std::string>> errors; // line, message
  std::size_t rejected = 0;
  std::size_t duplicates = 0;
};
SourceScan find_source_programs(std::string_view corpus, const Limits &limits = {});

} // namespace progeq
