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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "progeq/datagen.hpp"
#include "progeq/search.hpp"

namespace progeq {

// Builds a policy for one sample. Called once per search, possibly from
// several threads at once.
using PolicyFactory = std::function<std::unique_ptr<Policy>(const Sample &)>;

struct SearchOutcomePair {
  Sample sample;
  ProofResult easy;
  ProofResult hard;
  std::string error; // non-empty when a search threw
};

struct SelectionConfig {
  int easy_width = 2;
  int hard_width = 20;
  int beam = 3;
  int max_steps = 25;
  int shorter_by = 2;
  // Probability of admitting a shorter hard proof of length L:
  // length_inclusion(L) when set, else min(1, L / length_scale).
  std::function<double(std::size_t)> length_inclusion;
  double length_scale = 20.0;
  // A target token is rare when its count is below `rare_threshold`, or
  // without one, below rare_fraction times the mean count over the target
  // vocabulary.
  std::optional<std::uint64_t> rare_threshold;
  double rare_fraction = 0.02;
  // Keep per-step expansions of the hard search for hindsight.
  bool record_traces = false;
  std::uint64_t seed = 0;
  int jobs = 1;

  double inclusion_probability(std::size_t len) const;
  std::optional<std::string> validate() const;
};

using TokenCounts = std::map<std::string, std::uint64_t>;

// One training example: "ProgCurrent Y ProgB" and a single rule line.
struct StepSample {
  std::string src;
  std::string tgt;
  std::string sample_id;
};

// Runs prove() with I = easy_width and I = hard_width on every sample.
// Search failures are recorded per sample; the output order matches the
// input.
std::vector<SearchOutcomePair> run_easy_hard(const std::vector<Sample> &samples,
                                             const PolicyFactory &policy,
                                             const SelectionConfig &cfg);

// Every target-side token the rule grammar can produce within the model
// limits: statement numbers, rule names, node paths and variables.
std::vector<std::string> target_vocabulary(const Limits &limits = {});

std::set<std::string> rare_tokens(const TokenCounts &freqs, const SelectionConfig &cfg,
                                  const Limits &limits = {});

enum Criterion : unsigned {
  kChallenging = 1, // found with I_h, not with I_e
  kShorter = 2,     // I_h proof at least shorter_by steps shorter
  kRareToken = 4,   // I_h proof uses a rare target token
};
std::string criteria_names(unsigned mask);

struct SelectedSample {
  Sample sample; // gen_seq holds the hard proof
  unsigned criteria = 0;
};

// Chooses the next round's training proofs. Deterministic for a given seed;
// the length draw for each sample depends only on the seed and sample id.
// Proofs that do not verify are never returned; duplicates (same pair and
// proof) are dropped.
std::vector<SelectedSample> select(const std::vector<SearchOutcomePair> &outcomes,
                                   const TokenCounts &freqs, const SelectionConfig &cfg);

// Single-step samples for legal rewrites using a rare target token seen
// while a hard search failed.
std::vector<StepSample> hindsight(const std::vector<SearchOutcomePair> &outcomes,
                                  const TokenCounts &freqs, const SelectionConfig &cfg);

// A k-step proof gives k samples: intermediate i paired with ProgB, target
// rule i + 1. Samples without a sequence contribute nothing.
std::vector<StepSample> expand_steps(const std::vector<Sample> &samples);
std::vector<StepSample> expand_steps(const Sample &sample);

TokenCounts token_frequencies(const std::vector<StepSample> &samples);

// Success rates by rewrite-sequence category (rows) and ProgA shape
// (columns).
struct EvalReport {
  static const std::vector<std::string> &row_names();
  static const std::vector<std::string> &column_names();
  struct Cell {
    std::size_t found = 0;
    std::size_t total = 0;
  };
  std::vector<std::vector<Cell>> cells; // [row][column]
  std::size_t errors = 0;

  EvalReport();
  std::string format_table() const;
  std::string format_csv() const;
};

// Row membership of a sample; the sample needs gen_seq for every row but
// the first.
std::vector<bool> eval_rows(const Sample &s);
std::vector<bool> eval_columns(const Sample &s);

struct EvalResult {
  EvalReport report;
  std::vector<ProofResult> results; // per sample
  std::vector<std::string> errors;  // per sample, empty when none
};
EvalResult evaluate_policy(const std::vector<Sample> &samples, const PolicyFactory &policy,
                           const SearchConfig &cfg, int jobs = 1);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn);

} // namespace progeq
