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

#include "progeq/curate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "progeq/verify.hpp"

namespace progeq {

namespace {

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t hash_id(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool uses_rare(const std::vector<RewriteRule> &seq, const std::set<std::string> &rare) {
  for (const RewriteRule &r : seq)
    for (const std::string &t : rule_tokens(r))
      if (rare.count(t))
        return true;
  return false;
}

std::string pair_text(const Program &a, const Program &b) { return print_pair(a, b); }

} // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn) {
  std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w)
    threads.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first_error)
            first_error = std::current_exception();
        }
      }
    });
  for (std::thread &t : threads)
    t.join();
  if (first_error)
    std::rethrow_exception(first_error);
}

std::optional<std::string> SelectionConfig::validate() const {
  if (easy_width < 1 || hard_width <= easy_width)
    return "need 1 <= easy_width < hard_width";
  if (beam < 1 || max_steps < 1)
    return "beam and max_steps must be positive";
  if (shorter_by < 1)
    return "shorter_by must be positive";
  if (!(rare_fraction >= 0 && rare_fraction <= 1))
    return "rare_fraction must lie in [0, 1]";
  if (!(length_scale > 0))
    return "length_scale must be positive";
  return std::nullopt;
}

double SelectionConfig::inclusion_probability(std::size_t len) const {
  if (length_inclusion)
    return length_inclusion(len);
  return std::min(1.0, static_cast<double>(len) / length_scale);
}

std::vector<SearchOutcomePair> run_easy_hard(const std::vector<Sample> &samples,
                                             const PolicyFactory &policy,
                                             const SelectionConfig &cfg) {
  if (auto err = cfg.validate())
    throw std::invalid_argument(*err);
  std::vector<SearchOutcomePair> out(samples.size());
  parallel_for(samples.size(), cfg.jobs, [&](std::size_t i) {
    SearchOutcomePair &o = out[i];
    o.sample = samples[i];
    SearchConfig sc;
    sc.beam = cfg.beam;
    sc.max_steps = cfg.max_steps;
    try {
      sc.width = cfg.easy_width;
      auto easy_policy = policy(samples[i]);
      o.easy = prove(samples[i].prog_a, samples[i].prog_b, *easy_policy, sc);
      sc.width = cfg.hard_width;
      sc.record_trace = cfg.record_traces;
      auto hard_policy = policy(samples[i]);
      o.hard = prove(samples[i].prog_a, samples[i].prog_b, *hard_policy, sc);
    } catch (const std::exception &e) {
      o.error = e.what();
    }
  });
  return out;
}

std::vector<std::string> target_vocabulary(const Limits &limits) {
  std::vector<std::string> vocab;
  for (int i = 1; i <= limits.max_statements; ++i)
    vocab.push_back("stm" + std::to_string(i));
  for (RuleName r : all_rules())
    vocab.emplace_back(rule_name_str(r));
  std::vector<NodePath> frontier{NodePath{}};
  while (!frontier.empty()) {
    std::vector<NodePath> next;
    for (const NodePath &p : frontier) {
      vocab.push_back(p.str());
      if (p.can_descend()) {
        next.push_back(p.child('l'));
        next.push_back(p.child('r'));
      }
    }
    frontier = std::move(next);
  }
  for (int i = 1; i <= std::min(limits.max_scalar_vars, kMaxScalarVars); ++i)
    vocab.push_back(VarId{Type::Scalar, static_cast<std::uint8_t>(i)}.str());
  for (int i = 1; i <= kMaxVectorVars; ++i)
    vocab.push_back(VarId{Type::Vector, static_cast<std::uint8_t>(i)}.str());
  return vocab;
}

std::set<std::string> rare_tokens(const TokenCounts &freqs, const SelectionConfig &cfg,
                                  const Limits &limits) {
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  double total = 0;
  for (std::string &tok : target_vocabulary(limits)) {
    auto it = freqs.find(tok);
    std::uint64_t n = it == freqs.end() ? 0 : it->second;
    total += static_cast<double>(n);
    counts.push_back({std::move(tok), n});
  }
  double cutoff = cfg.rare_threshold ? static_cast<double>(*cfg.rare_threshold)
                                     : cfg.rare_fraction * total / counts.size();
  std::set<std::string> rare;
  for (auto &[tok, n] : counts)
    if (static_cast<double>(n) < cutoff)
      rare.insert(tok);
  return rare;
}

std::string criteria_names(unsigned mask) {
  std::string out;
  auto add = [&](const char *name) {
    if (!out.empty())
      out += ',';
    out += name;
  };
  if (mask & kChallenging)
    add("challenging");
  if (mask & kShorter)
    add("shorter");
  if (mask & kRareToken)
    add("rare");
  return out;
}

std::vector<SelectedSample> select(const std::vector<SearchOutcomePair> &outcomes,
                                   const TokenCounts &freqs, const SelectionConfig &cfg) {
  if (auto err = cfg.validate())
    throw std::invalid_argument(*err);
  std::set<std::string> rare = rare_tokens(freqs, cfg);
  std::set<std::string> seen;
  std::vector<SelectedSample> out;
  for (const SearchOutcomePair &o : outcomes) {
    if (!o.error.empty() || !o.hard.found())
      continue;
    const std::vector<RewriteRule> &proof = o.hard.proof;
    unsigned criteria = 0;
    if (!o.easy.found()) {
      criteria |= kChallenging;
    } else if (o.easy.proof.size() >= proof.size() + cfg.shorter_by) {
      Rng rng(derive_seed(cfg.seed, hash_id(o.sample.id)));
      if (coin(rng, cfg.inclusion_probability(proof.size())))
        criteria |= kShorter;
    }
    if (uses_rare(proof, rare))
      criteria |= kRareToken;
    if (!criteria)
      continue;
    if (!verify(o.sample.prog_a, o.sample.prog_b, proof).proven())
      continue;
    std::string key = pair_text(o.sample.prog_a, o.sample.prog_b);
    for (const RewriteRule &r : proof)
      key += "\n" + print_rule(r);
    if (!seen.insert(key).second)
      continue;
    SelectedSample s{o.sample, criteria};
    s.sample.gen_seq = proof;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<StepSample> hindsight(const std::vector<SearchOutcomePair> &outcomes,
                                  const TokenCounts &freqs, const SelectionConfig &cfg) {
  std::set<std::string> rare = rare_tokens(freqs, cfg);
  std::set<std::string> seen;
  std::vector<StepSample> out;
  for (const SearchOutcomePair &o : outcomes) {
    if (!o.error.empty() || o.hard.found())
      continue;
    for (const TraceStep &t : o.hard.trace) {
      if (!uses_rare({t.rule}, rare))
        continue;
      if (!check_limits(t.before).ok() || !check_limits(t.after).ok())
        continue;
      const RewriteRule one[] = {t.rule};
      if (!verify(t.before, t.after, one).proven())
        continue;
      StepSample s{pair_text(t.before, t.after), print_rule(t.rule), o.sample.id};
      if (seen.insert(s.src + "\n" + s.tgt).second)
        out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<StepSample> expand_steps(const Sample &sample) {
  std::vector<StepSample> out;
  if (!sample.gen_seq)
    return out;
  Program cur = sample.prog_a;
  for (const RewriteRule &r : *sample.gen_seq) {
    out.push_back({pair_text(cur, sample.prog_b), print_rule(r), sample.id});
    ApplyOutcome next = apply(r, cur);
    if (!next)
      throw std::invalid_argument("sample " + sample.id + ": step '" + print_rule(r) +
                                  "' fails with " +
                                  std::string(failure_name(next.failure())));
    cur = std::move(next).program();
  }
  return out;
}

std::vector<StepSample> expand_steps(const std::vector<Sample> &samples) {
  std::vector<StepSample> out;
  for (const Sample &s : samples) {
    auto steps = expand_steps(s);
    out.insert(out.end(), std::make_move_iterator(steps.begin()),
               std::make_move_iterator(steps.end()));
  }
  return out;
}

TokenCounts token_frequencies(const std::vector<StepSample> &samples) {
  TokenCounts counts;
  for (const StepSample &s : samples)
    for (std::string_view tok : split_tokens(s.tgt))
      ++counts[std::string(tok)];
  return counts;
}

const std::vector<std::string> &EvalReport::row_names() {
  static const std::vector<std::string> names{
      "Whole dataset",      "Rename",           "Newtmp",
      "DistributeLeft",     "No statement rules", "NodeID at depth 5",
      "Rewrite steps 1-10", "Rewrite steps 11+"};
  return names;
}

const std::vector<std::string> &EvalReport::column_names() {
  static const std::vector<std::string> names{"ALL", "Functions 3 or more",
                                              "Maximum Expression Depth 4-6",
                                              "Nodes 30-100"};
  return names;
}

EvalReport::EvalReport()
    : cells(row_names().size(), std::vector<Cell>(column_names().size())) {}

namespace {

std::string percent_cell(const EvalReport::Cell &c) {
  if (c.total == 0)
    return "-(0)";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f%%(%zu)", 100.0 * c.found / c.total, c.total);
  return buf;
}

} // namespace

std::string EvalReport::format_table() const {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Rewrite Rules"});
  for (const std::string &c : column_names())
    grid.back().push_back(c);
  for (std::size_t r = 0; r < cells.size(); ++r) {
    grid.push_back({row_names()[r]});
    for (const Cell &c : cells[r])
      grid.back().push_back(percent_cell(c));
  }
  std::vector<std::size_t> width(grid[0].size(), 0);
  for (const auto &row : grid)
    for (std::size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  std::ostringstream out;
  for (const auto &row : grid) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == 0)
        out << row[i] << std::string(width[i] - row[i].size(), ' ');
      else
        out << "  " << std::string(width[i] - row[i].size(), ' ') << row[i];
    }
    out << '\n';
  }
  if (errors)
    out << "search errors: " << errors << '\n';
  return out.str();
}

std::string EvalReport::format_csv() const {
  std::ostringstream out;
  out << "row,column,found,total\n";
  for (std::size_t r = 0; r < cells.size(); ++r)
    for (std::size_t c = 0; c < cells[r].size(); ++c)
      out << '"' << row_names()[r] << "\",\"" << column_names()[c] << "\","
          << cells[r][c].found << ',' << cells[r][c].total << '\n';
  return out.str();
}

std::vector<bool> eval_rows(const Sample &s) {
  std::vector<bool> rows(EvalReport::row_names().size(), false);
  rows[0] = true;
  if (!s.gen_seq)
    return rows;
  const auto &seq = *s.gen_seq;
  auto uses = [&](RuleName n) {
    return std::any_of(seq.begin(), seq.end(), [n](const RewriteRule &r) { return r.name == n; });
  };
  rows[1] = uses(RuleName::Rename);
  rows[2] = uses(RuleName::NewTmp);
  rows[3] = uses(RuleName::DistributeLeft);
  rows[4] = std::none_of(seq.begin(), seq.end(),
                         [](const RewriteRule &r) { return is_statement_rule(r.name); });
  rows[5] = std::any_of(seq.begin(), seq.end(), [](const RewriteRule &r) {
    return r.path && r.path->length() == NodePath::kMaxLetters;
  });
  rows[6] = !seq.empty() && seq.size() <= 10;
  rows[7] = seq.size() >= 11;
  return rows;
}

std::vector<bool> eval_columns(const Sample &s) {
  const Program &a = s.prog_a;
  int depth = a.max_depth();
  int nodes = a.node_count();
  return {true, a.function_count() >= 3, depth >= 4 && depth <= 6, nodes >= 30 && nodes <= 100};
}

EvalResult evaluate_policy(const std::vector<Sample> &samples, const PolicyFactory &policy,
                           const SearchConfig &cfg, int jobs) {
  EvalResult res;
  res.results.resize(samples.size());
  res.errors.resize(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    try {
      auto p = policy(samples[i]);
      res.results[i] = prove(samples[i].prog_a, samples[i].prog_b, *p, cfg);
    } catch (const std::exception &e) {
      res.errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    bool found = res.errors[i].empty() && res.results[i].found();
    res.report.errors += !res.errors[i].empty();
    std::vector<bool> rows = eval_rows(samples[i]);
    std::vector<bool> cols = eval_columns(samples[i]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        if (rows[r] && cols[c]) {
          ++res.report.cells[r][c].total;
          res.report.cells[r][c].found += found;
        }
  }
  return res;
}

} // namespace progeq
