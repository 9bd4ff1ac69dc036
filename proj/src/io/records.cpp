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

#include "progeq/io.hpp"

#include <fstream>
#include <sstream>

#include "progeq/verify.hpp"

namespace progeq {

namespace {

std::vector<std::string> rules_to_strings(const std::vector<RewriteRule> &seq) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (const RewriteRule &r : seq)
    out.push_back(print_rule(r));
  return out;
}

std::vector<RewriteRule> rules_from_json(const Json &j) {
  if (!j.is_array())
    throw DataError("rule list must be an array");
  std::vector<RewriteRule> out;
  for (const Json &r : j) {
    if (!r.is_string())
      throw DataError("rule must be a string");
    try {
      out.push_back(parse_rule(r.get<std::string>()));
    } catch (const std::exception &e) {
      throw DataError("bad rule '" + r.get<std::string>() + "': " + e.what());
    }
  }
  return out;
}

const Json &field(const Json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end())
    throw DataError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string string_field(const Json &j, const char *key) {
  const Json &v = field(j, key);
  if (!v.is_string())
    throw DataError(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

Program program_field(const Json &j, const char *key, const Limits &limits) {
  std::string text = string_field(j, key);
  try {
    return parse_prefix(text, limits);
  } catch (const std::exception &e) {
    throw DataError(std::string(key) + ": " + e.what());
  }
}

// Reads `key` into `out` when present; type errors become DataError.
template <typename T> void read_opt(const Json &j, const char *key, T &out) {
  auto it = j.find(key);
  if (it == j.end())
    return;
  try {
    out = it->template get<T>();
  } catch (const Json::exception &e) {
    throw DataError(std::string("config key \"") + key + "\": " + e.what());
  }
}

void reject_unknown(const Json &j, std::initializer_list<const char *> known,
                    const char *what) {
  if (!j.is_object())
    throw DataError(std::string(what) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char *k : known)
      ok |= it.key() == k;
    if (!ok)
      throw DataError(std::string("unknown ") + what + " key \"" + it.key() + "\"");
  }
}

} // namespace

Json sample_to_json(const Sample &s) {
  Json j{{"id", s.id},
         {"provenance", std::string(provenance_name(s.provenance))},
         {"prog_a", print_prefix(s.prog_a)},
         {"prog_b", print_prefix(s.prog_b)}};
  if (s.gen_seq)
    j["gen_seq"] = rules_to_strings(*s.gen_seq);
  return j;
}

Sample sample_from_json(const Json &j, const Limits &limits) {
  if (!j.is_object())
    throw DataError("sample record must be an object");
  Sample s;
  s.id = string_field(j, "id");
  if (j.contains("provenance")) {
    auto p = provenance_from(string_field(j, "provenance"));
    if (!p)
      throw DataError("unknown provenance " + j["provenance"].dump());
    s.provenance = *p;
  }
  s.prog_a = program_field(j, "prog_a", limits);
  s.prog_b = program_field(j, "prog_b", limits);
  if (j.contains("gen_seq") && !j["gen_seq"].is_null())
    s.gen_seq = rules_from_json(j["gen_seq"]);
  return s;
}

Json result_to_json(const ResultRecord &r) {
  Json j = sample_to_json(r.sample);
  if (!r.error.empty()) {
    j["status"] = "Error";
    j["error"] = r.error;
    return j;
  }
  j["status"] = status_name(r.result.status);
  j["states_expanded"] = r.result.states_expanded;
  if (r.result.found()) {
    bool ok = verify(r.sample.prog_a, r.sample.prog_b, r.result.proof, false,
                     Limits::unlimited())
                  .proven();
    j["verified"] = ok;
    if (ok) {
      j["proof"] = rules_to_strings(r.result.proof);
      j["proof_length"] = r.result.proof.size();
    } else {
      j["status"] = "Rejected";
    }
  }
  return j;
}

ResultRecord result_from_json(const Json &j) {
  ResultRecord r;
  r.sample = sample_from_json(j);
  std::string status = string_field(j, "status");
  if (status == "Error") {
    r.error = j.value("error", std::string("unknown error"));
    return r;
  }
  if (status == "Rejected") {
    r.error = "proof rejected by the verifier";
    return r;
  }
  auto st = status_from(status);
  if (!st)
    throw DataError("unknown status \"" + status + "\"");
  r.result.status = *st;
  r.result.states_expanded = j.value("states_expanded", std::size_t{0});
  if (r.result.found()) {
    r.result.proof = rules_from_json(field(j, "proof"));
    if (!verify(r.sample.prog_a, r.sample.prog_b, r.result.proof, false, Limits::unlimited())
             .proven())
      throw DataError("record " + r.sample.id + ": proof does not verify");
  }
  return r;
}

std::vector<Json> read_jsonl(std::istream &in, const std::string &name) {
  std::vector<Json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::exception &e) {
      throw DataError(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Json> read_jsonl_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path);
  return read_jsonl(in, path);
}

void write_jsonl(std::ostream &out, const std::vector<Json> &records) {
  for (const Json &j : records)
    out << j.dump() << '\n';
}

namespace {

template <typename T, typename F>
std::vector<T> read_records(const std::string &path, F convert) {
  std::vector<T> out;
  std::size_t index = 0;
  for (const Json &j : read_jsonl_file(path)) {
    ++index;
    try {
      out.push_back(convert(j));
    } catch (const DataError &e) {
      throw DataError(path + ": record " + std::to_string(index) + ": " + e.what());
    }
  }
  return out;
}

template <typename T, typename F>
void write_records(const std::string &path, const std::vector<T> &items, F convert) {
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write " + path);
  for (const T &item : items)
    out << convert(item).dump() << '\n';
  if (!out)
    throw DataError("write failed: " + path);
}

} // namespace

std::vector<Sample> read_samples(const std::string &path) {
  return read_records<Sample>(path, [](const Json &j) { return sample_from_json(j); });
}

void write_samples(const std::string &path, const std::vector<Sample> &samples) {
  write_records(path, samples, sample_to_json);
}

std::vector<ResultRecord> read_results(const std::string &path) {
  return read_records<ResultRecord>(path, result_from_json);
}

void write_results(const std::string &path, const std::vector<ResultRecord> &results) {
  write_records(path, results, result_to_json);
}

Limits limits_from_json(const Json &j, Limits base) {
  reject_unknown(j, {"max_statements", "max_nodes", "max_scalar_vars", "max_depth", "max_outputs"},
                 "limits");
  read_opt(j, "max_statements", base.max_statements);
  read_opt(j, "max_nodes", base.max_nodes);
  read_opt(j, "max_scalar_vars", base.max_scalar_vars);
  read_opt(j, "max_depth", base.max_depth);
  read_opt(j, "max_outputs", base.max_outputs);
  return base;
}

Json limits_to_json(const Limits &l) {
  return {{"max_statements", l.max_statements},
          {"max_nodes", l.max_nodes},
          {"max_scalar_vars", l.max_scalar_vars},
          {"max_depth", l.max_depth},
          {"max_outputs", l.max_outputs}};
}

GenConfig gen_config_from_json(const Json &j, GenConfig base) {
  reject_unknown(j,
                 {"profile", "seed", "statement_weights", "depth_weights", "two_outputs_prob",
                  "fixed_outputs", "min_nodes", "vector_output_prob", "late_definition_prob",
                  "leaf_prob", "constant_prob", "reuse_var_prob", "function_prob",
                  "scalar_op_weights", "vector_op_weights", "vector_subexpr_prob",
                  "duplicate_prob", "copy_subtree_prob", "rule_prob", "intensity_sigma",
                  "intensity_mu", "passes", "min_steps", "limits", "max_retries"},
                 "generator config");
  if (j.contains("profile")) {
    std::string profile = string_field(j, "profile");
    if (profile == "standard")
      base = GenConfig::standard();
    else if (profile == "small")
      base = GenConfig::small();
    else if (profile == "generalization")
      base = GenConfig::generalization();
    else
      throw DataError("unknown profile \"" + profile + "\"");
  }
  read_opt(j, "seed", base.seed);
  read_opt(j, "statement_weights", base.statement_weights);
  read_opt(j, "depth_weights", base.depth_weights);
  read_opt(j, "two_outputs_prob", base.two_outputs_prob);
  read_opt(j, "fixed_outputs", base.fixed_outputs);
  read_opt(j, "min_nodes", base.min_nodes);
  read_opt(j, "vector_output_prob", base.vector_output_prob);
  read_opt(j, "late_definition_prob", base.late_definition_prob);
  read_opt(j, "leaf_prob", base.leaf_prob);
  read_opt(j, "constant_prob", base.constant_prob);
  read_opt(j, "reuse_var_prob", base.reuse_var_prob);
  read_opt(j, "function_prob", base.function_prob);
  read_opt(j, "scalar_op_weights", base.scalar_op_weights);
  read_opt(j, "vector_op_weights", base.vector_op_weights);
  read_opt(j, "vector_subexpr_prob", base.vector_subexpr_prob);
  read_opt(j, "duplicate_prob", base.duplicate_prob);
  read_opt(j, "copy_subtree_prob", base.copy_subtree_prob);
  read_opt(j, "intensity_sigma", base.intensity_sigma);
  read_opt(j, "intensity_mu", base.intensity_mu);
  read_opt(j, "passes", base.passes);
  read_opt(j, "min_steps", base.min_steps);
  read_opt(j, "max_retries", base.max_retries);
  if (j.contains("limits"))
    base.limits = limits_from_json(j["limits"], base.limits);
  if (j.contains("rule_prob")) {
    const Json &rp = j["rule_prob"];
    if (!rp.is_object())
      throw DataError("rule_prob must be an object of rule name to probability");
    for (auto it = rp.begin(); it != rp.end(); ++it) {
      auto r = rule_name_from(it.key());
      if (!r)
        throw DataError("unknown rule \"" + it.key() + "\" in rule_prob");
      if (!it->is_number())
        throw DataError("rule_prob." + it.key() + " must be a number");
      base.set_rule_prob(*r, it->get<double>());
    }
  }
  if (auto err = base.validate())
    throw DataError("generator config: " + *err);
  return base;
}

Json gen_config_to_json(const GenConfig &c) {
  Json rp = Json::object();
  for (RuleName r : all_rules())
    rp[std::string(rule_name_str(r))] = c.prob(r);
  return {{"seed", c.seed},
          {"statement_weights", c.statement_weights},
          {"depth_weights", c.depth_weights},
          {"two_outputs_prob", c.two_outputs_prob},
          {"fixed_outputs", c.fixed_outputs},
          {"min_nodes", c.min_nodes},
          {"vector_output_prob", c.vector_output_prob},
          {"late_definition_prob", c.late_definition_prob},
          {"leaf_prob", c.leaf_prob},
          {"constant_prob", c.constant_prob},
          {"reuse_var_prob", c.reuse_var_prob},
          {"function_prob", c.function_prob},
          {"scalar_op_weights", c.scalar_op_weights},
          {"vector_op_weights", c.vector_op_weights},
          {"vector_subexpr_prob", c.vector_subexpr_prob},
          {"duplicate_prob", c.duplicate_prob},
          {"copy_subtree_prob", c.copy_subtree_prob},
          {"rule_prob", rp},
          {"intensity_sigma", c.intensity_sigma},
          {"intensity_mu", c.intensity_mu},
          {"passes", c.passes},
          {"min_steps", c.min_steps},
          {"limits", limits_to_json(c.limits)},
          {"max_retries", c.max_retries}};
}

SelectionConfig selection_config_from_json(const Json &j, SelectionConfig base) {
  reject_unknown(j,
                 {"easy_width", "hard_width", "beam", "max_steps", "shorter_by", "length_scale",
                  "rare_threshold", "rare_fraction", "record_traces", "seed", "jobs"},
                 "selection config");
  read_opt(j, "easy_width", base.easy_width);
  read_opt(j, "hard_width", base.hard_width);
  read_opt(j, "beam", base.beam);
  read_opt(j, "max_steps", base.max_steps);
  read_opt(j, "shorter_by", base.shorter_by);
  read_opt(j, "length_scale", base.length_scale);
  read_opt(j, "rare_fraction", base.rare_fraction);
  read_opt(j, "record_traces", base.record_traces);
  read_opt(j, "seed", base.seed);
  read_opt(j, "jobs", base.jobs);
  if (j.contains("rare_threshold")) {
    if (j["rare_threshold"].is_null())
      base.rare_threshold.reset();
    else
      base.rare_threshold = j["rare_threshold"].get<std::uint64_t>();
  }
  if (auto err = base.validate())
    throw DataError("selection config: " + *err);
  return base;
}

Json selection_config_to_json(const SelectionConfig &c) {
  Json j{{"easy_width", c.easy_width},     {"hard_width", c.hard_width},
         {"beam", c.beam},                 {"max_steps", c.max_steps},
         {"shorter_by", c.shorter_by},     {"length_scale", c.length_scale},
         {"rare_fraction", c.rare_fraction}, {"record_traces", c.record_traces},
         {"seed", c.seed},                 {"jobs", c.jobs}};
  j["rare_threshold"] = c.rare_threshold ? Json(*c.rare_threshold) : Json(nullptr);
  return j;
}

Json token_counts_to_json(const TokenCounts &c) {
  Json j = Json::object();
  for (const auto &[tok, n] : c)
    j[tok] = n;
  return j;
}

TokenCounts token_counts_from_json(const Json &j) {
  if (!j.is_object())
    throw DataError("token counts must be an object of token to count");
  TokenCounts c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it->is_number_unsigned())
      throw DataError("count for \"" + it.key() + "\" must be a non-negative integer");
    c[it.key()] = it->get<std::uint64_t>();
  }
  return c;
}

void export_training(const std::string &prefix, const std::vector<StepSample> &steps,
                     const std::vector<ExportMeta> &meta) {
  std::ostringstream src, tgt;
  for (const StepSample &s : steps) {
    src << s.src << '\n';
    tgt << s.tgt << '\n';
  }
  write_file(prefix + ".src", src.str());
  write_file(prefix + ".tgt", tgt.str());
  std::ostringstream m;
  for (const ExportMeta &e : meta)
    m << Json{{"id", e.id},
              {"provenance", std::string(provenance_name(e.provenance))},
              {"proof_length", e.proof_length},
              {"criteria", e.criteria}}
             .dump()
      << '\n';
  write_file(prefix + ".meta.jsonl", m.str());
}

void export_pair_text(const std::string &prefix, const std::vector<Sample> &samples) {
  std::ostringstream pairs, seqs;
  for (const Sample &s : samples) {
    pairs << print_pair(s.prog_a, s.prog_b) << '\n';
    if (s.gen_seq) {
      bool first = true;
      for (const RewriteRule &r : *s.gen_seq) {
        seqs << (first ? "" : " ; ") << print_rule(r);
        first = false;
      }
    }
    seqs << '\n';
  }
  write_file(prefix + ".pairs.txt", pairs.str());
  write_file(prefix + ".rules.txt", seqs.str());
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw DataError("cannot write " + path);
  out << text;
  if (!out)
    throw DataError("write failed: " + path);
}

} // namespace progeq
