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

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "progeq/curate.hpp"
#include "progeq/datagen.hpp"
#include "progeq/search.hpp"

namespace progeq {

using Json = nlohmann::json;

// Malformed input data; carries the source position when known.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Pairs file, one JSON object per line:
//   {"id", "provenance", "prog_a", "prog_b", "gen_seq": [rule, ...]}
// gen_seq is omitted when unknown.
Json sample_to_json(const Sample &s);
Sample sample_from_json(const Json &j, const Limits &limits = Limits::unlimited());

// Result record: the pair plus the search outcome. "verified" is the
// verifier's verdict on the proof; proofs are only written when it holds.
struct ResultRecord {
  Sample sample;
  ProofResult result;
  std::string error;
};
Json result_to_json(const ResultRecord &r);
ResultRecord result_from_json(const Json &j);

// JSON Lines helpers. Blank lines are skipped; errors name the line.
std::vector<Json> read_jsonl(std::istream &in, const std::string &name);
std::vector<Json> read_jsonl_file(const std::string &path);
void write_jsonl(std::ostream &out, const std::vector<Json> &records);

std::vector<Sample> read_samples(const std::string &path);
void write_samples(const std::string &path, const std::vector<Sample> &samples);
std::vector<ResultRecord> read_results(const std::string &path);
void write_results(const std::string &path, const std::vector<ResultRecord> &results);

// Generator and selection settings. Unknown keys are errors; missing keys
// keep the values of `base`.
GenConfig gen_config_from_json(const Json &j, GenConfig base = GenConfig::standard());
Json gen_config_to_json(const GenConfig &c);
SelectionConfig selection_config_from_json(const Json &j, SelectionConfig base = {});
Json selection_config_to_json(const SelectionConfig &c);
Limits limits_from_json(const Json &j, Limits base = {});
Json limits_to_json(const Limits &l);

Json token_counts_to_json(const TokenCounts &c);
TokenCounts token_counts_from_json(const Json &j);

// Training export: <prefix>.src / <prefix>.tgt hold one step sample per
// line, <prefix>.meta.jsonl one record per source sample.
struct ExportMeta {
  std::string id;
  Provenance provenance = Provenance::Synthetic;
  std::size_t proof_length = 0;
  std::string criteria;
};
void export_training(const std::string &prefix, const std::vector<StepSample> &steps,
                     const std::vector<ExportMeta> &meta);

// Paired line text: "ProgA Y ProgB" per line and the rule sequence joined
// by " ; " on the matching line of the second file.
void export_pair_text(const std::string &prefix, const std::vector<Sample> &samples);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &text);

} // namespace progeq
