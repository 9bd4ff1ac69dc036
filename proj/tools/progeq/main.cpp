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

// progeq: batch driver for pair generation, proof search, verification,
// training-data selection and reporting.
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "progeq/curate.hpp"
#include "progeq/io.hpp"
#include "progeq/policy_bridge.hpp"
#include "progeq/verify.hpp"

#ifndef PROGEQ_VERSION
#define PROGEQ_VERSION "dev"
#endif

using namespace progeq;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kTransport = 3 };

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  Json config = Json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void write(const std::string &out_path) const {
    Json j{{"command", command},
           {"argv", argv},
           {"config", config},
           {"inputs", inputs},
           {"outputs", outputs},
           {"tool_version", PROGEQ_VERSION}};
    j["seed"] = seed ? Json(*seed) : Json(nullptr);
    write_file(out_path + ".manifest.json", j.dump(2) + "\n");
  }
};

// An explicit seed, or a fresh one that is announced so the run can be
// repeated.
std::uint64_t resolve_seed(const std::optional<std::uint64_t> &seed) {
  if (seed)
    return *seed;
  std::random_device rd;
  std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << " (pass --seed " << s << " to reproduce)\n";
  return s;
}

Json load_json_file(const std::string &path) {
  std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception &e) {
    throw DataError(path + ": " + e.what());
  }
}

// Shared options for commands that run searches.
struct SearchOpts {
  std::string policy = "heuristic";
  int beam = 3;
  int width = 2;
  int steps = 25;
  int jobs = 1;
  double timeout_s = 30;
  std::size_t max_states = 2'000'000;

  void add(CLI::App *cmd) {
    cmd->add_option("--policy", policy, "heuristic | oracle | exhaustive | external:<command>")
        ->capture_default_str();
    cmd->add_option("--beam", beam, "proposals per intermediate (B)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--width", width, "intermediates kept per step (I)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--steps", steps, "step limit (Ns); depth for exhaustive")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--jobs", jobs, "parallel searches")->capture_default_str()->check(
        CLI::PositiveNumber);
    cmd->add_option("--timeout", timeout_s, "external policy timeout in seconds")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-states", max_states, "state budget for exhaustive search")
        ->capture_default_str();
  }

  SearchConfig search_config() const {
    SearchConfig c;
    c.beam = beam;
    c.width = width;
    c.max_steps = steps;
    return c;
  }

  Json to_json() const {
    return {{"policy", policy}, {"beam", beam},   {"width", width},
            {"steps", steps},   {"jobs", jobs},   {"timeout_s", timeout_s}};
  }
};

// Replays the proof found by exhaustive search, so the exhaustive baseline
// can run wherever a policy is expected.
class ExhaustivePolicy : public Policy {
public:
  ExhaustivePolicy(const Sample &s, int depth, std::size_t max_states)
      : replay_(s.prog_a, exhaustive_prove(s.prog_a, s.prog_b, depth, max_states).proof) {}
  std::vector<PolicyProposal> propose(const Program &cur, const Program &goal,
                                      int beam) override {
    return replay_.propose(cur, goal, beam);
  }

private:
  ReplayPolicy replay_;
};

// Counts transport failures passing through a policy.
class CountingPolicy : public Policy {
public:
  CountingPolicy(std::unique_ptr<Policy> inner, std::shared_ptr<std::atomic<int>> failures)
      : inner_(std::move(inner)), failures_(std::move(failures)) {}
  std::vector<PolicyProposal> propose(const Program &cur, const Program &goal,
                                      int beam) override {
    try {
      return inner_->propose(cur, goal, beam);
    } catch (const PolicyError &) {
      ++*failures_;
      throw;
    }
  }

private:
  std::unique_ptr<Policy> inner_;
  std::shared_ptr<std::atomic<int>> failures_;
};

struct PolicySource {
  PolicyFactory factory;
  std::shared_ptr<PolicyGateway> gateway;
  std::shared_ptr<std::atomic<int>> transport_failures = std::make_shared<std::atomic<int>>(0);
  bool exhaustive = false;
};

PolicySource make_policy(const SearchOpts &o) {
  PolicySource src;
  PolicyFactory base;
  if (o.policy == "heuristic") {
    base = [](const Sample &) { return std::make_unique<HeuristicPolicy>(); };
  } else if (o.policy == "oracle") {
    base = [](const Sample &s) -> std::unique_ptr<Policy> {
      if (!s.gen_seq)
        throw DataError("sample " + s.id + " has no rewrite sequence for the oracle policy");
      return std::make_unique<ReplayPolicy>(s.prog_a, *s.gen_seq);
    };
  } else if (o.policy == "exhaustive") {
    src.exhaustive = true;
    int depth = o.steps;
    std::size_t budget = o.max_states;
    base = [depth, budget](const Sample &s) {
      return std::make_unique<ExhaustivePolicy>(s, depth, budget);
    };
  } else if (o.policy.rfind("external:", 0) == 0) {
    std::string cmd = o.policy.substr(9);
    if (cmd.empty())
      throw UsageError("external policy needs a command");
    src.gateway = std::make_shared<PolicyGateway>(
        cmd, std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000)));
    auto gw = src.gateway;
    base = [gw](const Sample &) { return std::make_unique<ExternalPolicy>(gw); };
  } else {
    throw UsageError("unknown policy \"" + o.policy + "\"");
  }
  auto failures = src.transport_failures;
  src.factory = [base, failures](const Sample &s) -> std::unique_ptr<Policy> {
    return std::make_unique<CountingPolicy>(base(s), failures);
  };
  return src;
}

struct SearchRun {
  std::vector<ResultRecord> records;
  int transport_failures = 0;
};

SearchRun run_searches(const std::vector<Sample> &samples, const SearchOpts &o) {
  PolicySource src = make_policy(o);
  SearchConfig cfg = o.search_config();
  SearchRun run;
  run.records.resize(samples.size());
  parallel_for(samples.size(), o.jobs, [&](std::size_t i) {
    ResultRecord &rec = run.records[i];
    rec.sample = samples[i];
    try {
      if (src.exhaustive) {
        rec.result = exhaustive_prove(samples[i].prog_a, samples[i].prog_b, o.steps,
                                      o.max_states);
      } else {
        auto policy = src.factory(samples[i]);
        rec.result = prove(samples[i].prog_a, samples[i].prog_b, *policy, cfg);
      }
    } catch (const std::exception &e) {
      rec.error = e.what();
    }
  });
  run.transport_failures = *src.transport_failures;
  return run;
}

std::string histogram_text(const std::string &title, const std::map<int, std::size_t> &h) {
  std::ostringstream out;
  std::size_t total = 0, peak = 0;
  for (auto &[k, n] : h) {
    total += n;
    peak = std::max(peak, n);
  }
  out << title << " (n=" << total << ")\n";
  for (auto &[k, n] : h) {
    int bar = peak ? static_cast<int>(50.0 * n / peak + 0.5) : 0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%5d %8zu ", k, n);
    out << buf << std::string(bar, '#') << '\n';
  }
  return out.str();
}

std::vector<Sample> read_pairs_arg(const std::string &path, Manifest &m) {
  m.inputs.push_back(path);
  return read_samples(path);
}

// ---- commands -------------------------------------------------------------

struct GenSynthArgs {
  std::size_t count = 0;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string profile = "standard";
  std::string out;
  std::string id_prefix = "r";
  int jobs = 1;
};

int cmd_gen_synth(const GenSynthArgs &a, Manifest &m) {
  GenConfig base = a.profile == "small"            ? GenConfig::small()
                   : a.profile == "generalization" ? GenConfig::generalization()
                   : a.profile == "standard"
                       ? GenConfig::standard()
                       : throw UsageError("unknown profile \"" + a.profile + "\"");
  GenConfig cfg = base;
  if (!a.config.empty()) {
    m.inputs.push_back(a.config);
    cfg = gen_config_from_json(load_json_file(a.config), base);
  }
  cfg.seed = resolve_seed(a.seed);
  m.seed = cfg.seed;
  m.config = gen_config_to_json(cfg);
  auto corpus = generate_corpus(cfg, a.count, a.id_prefix, a.jobs);
  write_samples(a.out, corpus);
  m.outputs.push_back(a.out);
  std::cerr << "wrote " << corpus.size() << " pairs to " << a.out << '\n';
  return kOk;
}

struct GenCompiledArgs {
  std::string corpus;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
};

int cmd_gen_compiled(const GenCompiledArgs &a, Manifest &m) {
  GenConfig cfg = GenConfig::standard();
  if (!a.config.empty()) {
    m.inputs.push_back(a.config);
    cfg = gen_config_from_json(load_json_file(a.config));
  }
  cfg.seed = resolve_seed(a.seed);
  m.seed = cfg.seed;
  m.config = gen_config_to_json(cfg);
  m.inputs.push_back(a.corpus);
  SourceScan scan = find_source_programs(read_file(a.corpus), cfg.limits);
  for (auto &[line, msg] : scan.errors)
    std::cerr << a.corpus << ":" << line << ": " << msg << '\n';
  std::vector<Sample> out;
  for (const SourceSnippet &s : scan.accepted) {
    std::string prefix = "k" + std::to_string(s.line);
    for (Sample &p : compile_pairs(s.program, cfg, derive_seed(cfg.seed, s.line), prefix))
      if (check_limits(p.prog_a, cfg.limits).ok() && check_limits(p.prog_b, cfg.limits).ok())
        out.push_back(std::move(p));
  }
  write_samples(a.out, out);
  m.outputs.push_back(a.out);
  std::cerr << "snippets: " << scan.accepted.size() << " accepted, " << scan.rejected
            << " rejected, " << scan.duplicates << " duplicates, " << scan.errors.size()
            << " parse errors; wrote " << out.size() << " pairs\n";
  return kOk;
}

struct ProveArgs {
  std::string pairs;
  std::string out;
  SearchOpts search;
};

int cmd_prove(const ProveArgs &a, Manifest &m) {
  m.config = a.search.to_json();
  auto samples = read_pairs_arg(a.pairs, m);
  SearchRun run = run_searches(samples, a.search);
  const auto &results = run.records;
  write_results(a.out, results);
  m.outputs.push_back(a.out);
  std::size_t found = 0, errors = 0;
  for (const ResultRecord &r : results) {
    found += r.error.empty() && r.result.found();
    errors += !r.error.empty();
  }
  std::cout << "found " << found << " of " << results.size();
  if (errors)
    std::cout << " (" << errors << " errors)";
  std::cout << '\n';
  return run.transport_failures ? kTransport : kOk;
}

struct VerifyArgs {
  std::string pair;
  std::string proof;
  std::string id;
};

int cmd_verify(const VerifyArgs &a, Manifest &m) {
  m.inputs = {a.proof};
  ProofFile pf = parse_proof_file(read_file(a.proof), Limits::unlimited());
  std::optional<Program> prog_a = pf.a, prog_b = pf.b;
  if (!a.pair.empty()) {
    m.inputs.push_back(a.pair);
    std::string text = read_file(a.pair);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      auto samples = read_samples(a.pair);
      auto it = std::find_if(samples.begin(), samples.end(), [&](const Sample &s) {
        return a.id.empty() || s.id == a.id;
      });
      if (it == samples.end())
        throw DataError(a.id.empty() ? a.pair + ": no records" : "no sample with id " + a.id);
      prog_a = it->prog_a;
      prog_b = it->prog_b;
    } else {
      auto [pa, pb] = parse_pair(text, Limits::unlimited());
      prog_a = pa;
      prog_b = pb;
    }
  }
  if (!prog_a || !prog_b)
    throw DataError("no programs: give --pair or A:/B: lines in the proof file");
  VerifyResult r = verify(*prog_a, *prog_b, pf.rules);
  std::cout << r.describe() << '\n';
  return r.proven() ? kOk : kData;
}

struct SelectArgs {
  std::string easy, hard, freqs, config, out;
  std::optional<std::uint64_t> seed;
};

int cmd_select(const SelectArgs &a, Manifest &m) {
  SelectionConfig cfg;
  std::optional<std::uint64_t> seed = a.seed;
  if (!a.config.empty()) {
    m.inputs.push_back(a.config);
    Json j = load_json_file(a.config);
    cfg = selection_config_from_json(j);
    if (!seed && j.contains("seed"))
      seed = cfg.seed;
  }
  cfg.seed = resolve_seed(seed);
  m.seed = cfg.seed;
  m.config = selection_config_to_json(cfg);
  m.inputs.insert(m.inputs.end(), {a.easy, a.hard, a.freqs});
  auto easy = read_results(a.easy);
  auto hard = read_results(a.hard);
  TokenCounts freqs = token_counts_from_json(load_json_file(a.freqs));
  std::map<std::string, const ResultRecord *> by_id;
  for (const ResultRecord &r : easy)
    if (!by_id.emplace(r.sample.id, &r).second)
      throw DataError(a.easy + ": duplicate id " + r.sample.id);
  std::vector<SearchOutcomePair> outcomes;
  for (const ResultRecord &h : hard) {
    auto it = by_id.find(h.sample.id);
    if (it == by_id.end())
      throw DataError("id " + h.sample.id + " missing from " + a.easy);
    if (print_pair(it->second->sample.prog_a, it->second->sample.prog_b) !=
        print_pair(h.sample.prog_a, h.sample.prog_b))
      throw DataError("id " + h.sample.id + " names different pairs in the two runs");
    SearchOutcomePair o{h.sample, it->second->result, h.result, h.error};
    if (!it->second->error.empty())
      o.error = it->second->error;
    outcomes.push_back(std::move(o));
  }
  auto selected = select(outcomes, freqs, cfg);
  std::ofstream out(a.out);
  if (!out)
    throw DataError("cannot write " + a.out);
  for (const SelectedSample &s : selected) {
    Json j = sample_to_json(s.sample);
    j["criteria"] = criteria_names(s.criteria);
    out << j.dump() << '\n';
  }
  m.outputs.push_back(a.out);
  std::cout << "selected " << selected.size() << " of " << outcomes.size() << '\n';
  return kOk;
}

struct HindsightArgs {
  std::string pairs, freqs, config, out;
  SearchOpts search;
};

int cmd_hindsight(const HindsightArgs &a, Manifest &m) {
  SelectionConfig cfg;
  if (!a.config.empty()) {
    m.inputs.push_back(a.config);
    cfg = selection_config_from_json(load_json_file(a.config));
  }
  cfg.record_traces = true;
  cfg.beam = a.search.beam;
  cfg.max_steps = a.search.steps;
  cfg.jobs = a.search.jobs;
  m.config = {{"selection", selection_config_to_json(cfg)}, {"search", a.search.to_json()}};
  auto samples = read_pairs_arg(a.pairs, m);
  m.inputs.push_back(a.freqs);
  TokenCounts freqs = token_counts_from_json(load_json_file(a.freqs));
  PolicySource src = make_policy(a.search);
  if (src.exhaustive)
    throw UsageError("hindsight needs a proposing policy, not exhaustive search");
  auto outcomes = run_easy_hard(samples, src.factory, cfg);
  auto steps = hindsight(outcomes, freqs, cfg);
  std::vector<ExportMeta> meta;
  std::map<std::string, std::size_t> per_sample;
  for (const StepSample &s : steps)
    ++per_sample[s.sample_id];
  for (const Sample &s : samples)
    if (per_sample.count(s.id))
      meta.push_back({s.id, s.provenance, 1, "hindsight"});
  export_training(a.out, steps, meta);
  m.outputs = {a.out + ".src", a.out + ".tgt", a.out + ".meta.jsonl"};
  std::cout << "hindsight samples: " << steps.size() << '\n';
  return *src.transport_failures ? kTransport : kOk;
}

struct ExportArgs {
  std::string pairs, out;
  bool text = false;
};

int cmd_export(const ExportArgs &a, Manifest &m) {
  m.inputs.push_back(a.pairs);
  auto records = read_jsonl_file(a.pairs);
  std::vector<Sample> samples;
  std::vector<ExportMeta> meta;
  for (const Json &j : records) {
    Sample s = sample_from_json(j);
    if (s.gen_seq && !verify(s.prog_a, s.prog_b, *s.gen_seq).proven())
      throw DataError("sample " + s.id + ": sequence does not verify");
    meta.push_back({s.id, s.provenance, s.gen_seq ? s.gen_seq->size() : 0,
                    j.value("criteria", std::string())});
    samples.push_back(std::move(s));
  }
  if (a.text) {
    export_pair_text(a.out, samples);
    m.outputs = {a.out + ".pairs.txt", a.out + ".rules.txt"};
  } else {
    auto steps = expand_steps(samples);
    export_training(a.out, steps, meta);
    m.outputs = {a.out + ".src", a.out + ".tgt", a.out + ".meta.jsonl"};
    std::cout << "step samples: " << steps.size() << " from " << samples.size() << " pairs\n";
  }
  return kOk;
}

struct EvalArgs {
  std::string pairs, report = "table2", out;
  SearchOpts search;
};

int cmd_eval(const EvalArgs &a, Manifest &m) {
  if (a.report != "table2" && a.report != "csv")
    throw UsageError("unknown report \"" + a.report + "\"");
  m.config = a.search.to_json();
  auto samples = read_pairs_arg(a.pairs, m);
  PolicySource src = make_policy(a.search);
  EvalResult res = evaluate_policy(samples, src.factory, a.search.search_config(), a.search.jobs);
  std::string text = a.report == "csv" ? res.report.format_csv() : res.report.format_table();
  std::cout << text;
  if (!a.out.empty()) {
    write_file(a.out, text);
    m.outputs.push_back(a.out);
  }
  return *src.transport_failures ? kTransport : kOk;
}

struct StatsArgs {
  std::string pairs, csv, freqs_out;
};

int cmd_stats(const StatsArgs &a, Manifest &m) {
  m.inputs.push_back(a.pairs);
  auto records = read_jsonl_file(a.pairs);
  std::map<int, std::size_t> stmts, nodes, lengths;
  std::map<std::string, std::size_t> rule_use;
  std::size_t with_seq = 0, over40 = 0;
  std::vector<Sample> samples;
  for (const Json &j : records) {
    Sample s = sample_from_json(j);
    ++stmts[static_cast<int>(s.prog_a.size())];
    ++nodes[s.prog_a.node_count() / 10 * 10];
    std::optional<std::vector<RewriteRule>> seq = s.gen_seq;
    if (j.contains("proof") && j.value("status", "") == "Found")
      seq = result_from_json(j).result.proof;
    if (seq) {
      ++with_seq;
      ++lengths[static_cast<int>(seq->size())];
      over40 += seq->size() > 40;
      std::set<RuleName> used;
      for (const RewriteRule &r : *seq)
        used.insert(r.name);
      for (RuleName r : used)
        ++rule_use[std::string(rule_name_str(r))];
      Sample t = s;
      t.gen_seq = seq;
      samples.push_back(std::move(t));
    }
  }
  std::cout << "pairs: " << records.size() << "\n\n"
            << histogram_text("statements in ProgA", stmts) << '\n'
            << histogram_text("nodes in ProgA (bins of 10)", nodes) << '\n'
            << histogram_text("rewrite sequence length", lengths) << '\n';
  std::cout << "sequences over 40 steps: " << over40 << "\n\nshare of sequences using each rule\n";
  for (RuleName r : all_rules()) {
    std::string name(rule_name_str(r));
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-17s %6.3f\n", name.c_str(),
                  with_seq ? static_cast<double>(rule_use[name]) / with_seq : 0.0);
    std::cout << buf;
  }
  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv << "histogram,bin,count\n";
    for (auto &[k, n] : stmts)
      csv << "statements," << k << ',' << n << '\n';
    for (auto &[k, n] : nodes)
      csv << "nodes," << k << ',' << n << '\n';
    for (auto &[k, n] : lengths)
      csv << "proof_length," << k << ',' << n << '\n';
    write_file(a.csv, csv.str());
    m.outputs.push_back(a.csv);
  }
  if (!a.freqs_out.empty()) {
    write_file(a.freqs_out,
               token_counts_to_json(token_frequencies(expand_steps(samples))).dump(2) + "\n");
    m.outputs.push_back(a.freqs_out);
  }
  return kOk;
}

void error_record(int code, const char *kind, const std::string &msg) {
  std::cerr << Json{{"error", {{"code", code}, {"kind", kind}, {"message", msg}}}}.dump()
            << '\n';
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Equivalence proofs for straight-line programs by rewriting"};
  app.set_version_flag("--version", PROGEQ_VERSION);
  app.require_subcommand(1);
  Manifest manifest;
  for (int i = 0; i < argc; ++i)
    manifest.argv.emplace_back(argv[i]);
  std::string manifest_out;
  std::function<int()> run;

  GenSynthArgs gs;
  auto *c_gs = app.add_subcommand("gen-synth", "generate synthetic equivalent pairs");
  c_gs->add_option("--count", gs.count, "number of pairs")->required();
  c_gs->add_option("--seed", gs.seed, "master seed");
  c_gs->add_option("--config", gs.config, "generator config JSON");
  c_gs->add_option("--profile", gs.profile, "standard | small | generalization")
      ->capture_default_str();
  c_gs->add_option("--out", gs.out, "pairs file (JSONL)")->required();
  c_gs->add_option("--id-prefix", gs.id_prefix)->capture_default_str();
  c_gs->add_option("--jobs", gs.jobs)->capture_default_str()->check(CLI::PositiveNumber);
  c_gs->callback([&] {
    manifest_out = gs.out;
    run = [&] { return cmd_gen_synth(gs, manifest); };
  });

  GenCompiledArgs gc;
  auto *c_gc = app.add_subcommand("gen-compiled", "pairs from compiler passes over snippets");
  c_gc->add_option("--corpus", gc.corpus, "normalized source, one snippet per line")
      ->required();
  c_gc->add_option("--seed", gc.seed, "master seed");
  c_gc->add_option("--config", gc.config, "generator config JSON");
  c_gc->add_option("--out", gc.out, "pairs file (JSONL)")->required();
  c_gc->callback([&] {
    manifest_out = gc.out;
    run = [&] { return cmd_gen_compiled(gc, manifest); };
  });

  ProveArgs pv;
  auto *c_pv = app.add_subcommand("prove", "search for proofs");
  c_pv->add_option("--pairs", pv.pairs)->required();
  c_pv->add_option("--out", pv.out, "results file (JSONL)")->required();
  pv.search.add(c_pv);
  c_pv->callback([&] {
    manifest_out = pv.out;
    run = [&] { return cmd_prove(pv, manifest); };
  });

  VerifyArgs vf;
  auto *c_vf = app.add_subcommand("verify", "check a rewrite sequence (exit 0 iff proven)");
  c_vf->add_option("--pair", vf.pair, "pairs JSONL or \"A Y B\" text");
  c_vf->add_option("--id", vf.id, "sample id within a pairs file");
  c_vf->add_option("--proof", vf.proof, "proof file")->required();
  c_vf->callback([&] { run = [&] { return cmd_verify(vf, manifest); }; });

  SelectArgs sl;
  auto *c_sl = app.add_subcommand("select", "choose training proofs from easy/hard runs");
  c_sl->add_option("--easy", sl.easy, "results with I = I_e")->required();
  c_sl->add_option("--hard", sl.hard, "results with I = I_h")->required();
  c_sl->add_option("--freqs", sl.freqs, "target token counts JSON")->required();
  c_sl->add_option("--config", sl.config, "selection config JSON");
  c_sl->add_option("--seed", sl.seed);
  c_sl->add_option("--out", sl.out)->required();
  c_sl->callback([&] {
    manifest_out = sl.out;
    run = [&] { return cmd_select(sl, manifest); };
  });

  HindsightArgs hs;
  auto *c_hs = app.add_subcommand("hindsight", "single-step samples from failed searches");
  c_hs->add_option("--pairs", hs.pairs)->required();
  c_hs->add_option("--freqs", hs.freqs, "target token counts JSON")->required();
  c_hs->add_option("--config", hs.config, "selection config JSON");
  c_hs->add_option("--out", hs.out, "output prefix")->required();
  hs.search.add(c_hs);
  c_hs->callback([&] {
    manifest_out = hs.out;
    run = [&] { return cmd_hindsight(hs, manifest); };
  });

  ExportArgs ex;
  auto *c_ex = app.add_subcommand("export", "write training files");
  c_ex->add_option("--pairs", ex.pairs)->required();
  c_ex->add_option("--out", ex.out, "output prefix")->required();
  c_ex->add_flag("--text", ex.text, "paired line text instead of step samples");
  c_ex->callback([&] {
    manifest_out = ex.out;
    run = [&] { return cmd_export(ex, manifest); };
  });

  EvalArgs ev;
  auto *c_ev = app.add_subcommand("eval", "success rates by category");
  c_ev->add_option("--pairs", ev.pairs)->required();
  c_ev->add_option("--report", ev.report, "table2 | csv")->capture_default_str();
  c_ev->add_option("--out", ev.out, "also write the report here");
  ev.search.add(c_ev);
  c_ev->callback([&] {
    manifest_out = ev.out;
    run = [&] { return cmd_eval(ev, manifest); };
  });

  StatsArgs st;
  auto *c_st = app.add_subcommand("stats", "histograms of program size and proof length");
  c_st->add_option("--pairs", st.pairs, "pairs or results JSONL")->required();
  c_st->add_option("--csv", st.csv, "write histograms as CSV");
  c_st->add_option("--freqs-out", st.freqs_out, "write target token counts JSON");
  c_st->callback([&] {
    manifest_out = !st.csv.empty() ? st.csv : st.freqs_out;
    run = [&] { return cmd_stats(st, manifest); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }
  for (CLI::App *sub : app.get_subcommands())
    manifest.command = sub->get_name();

  int code;
  try {
    code = run();
  } catch (const UsageError &e) {
    error_record(kUsage, "usage", e.what());
    return kUsage;
  } catch (const PolicyError &e) {
    error_record(kTransport, "policy", e.what());
    return kTransport;
  } catch (const std::exception &e) {
    error_record(kData, "data", e.what());
    return kData;
  }
  if (!manifest_out.empty()) {
    try {
      manifest.write(manifest_out);
    } catch (const std::exception &e) {
      error_record(kData, "data", e.what());
      return kData;
    }
  }
  return code;
}
