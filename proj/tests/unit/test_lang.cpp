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

#include <set>

#include "progeq/eval.hpp"
#include "progeq/normalized.hpp"
#include "progeq/program.hpp"

using namespace progeq;

namespace {

// Mixed scalar/vector program; statement 4 is the only output.
const char *kMixedA = "s26 = ( -s s01 s02 ) ; v08 = ( *sv s03 v01 ) ; "
                     "s27 = ( g1s v08 ) ; s25 === ( /s s26 ( *s s27 s03 ) ) ;";

VarId var(const char *t) { return *VarId::parse(t); }

} // namespace

TEST_CASE("parse_prefix accepts minimal and nested programs") {
  Program p = parse_prefix("s01 === ( +s s02 s03 ) ;");
  REQUIRE(p.size() == 1);
  CHECK(p.stmts[0].is_output);
  CHECK(p.stmts[0].target == var("s01"));
  CHECK(p.stmts[0].rhs.op == Op::AddS);

  Program q = parse_prefix("s25 = ( /s s26 ( *s s27 s28 ) ) ;");
  REQUIRE(q.size() == 1);
  CHECK(q.stmts[0].rhs.op == Op::DivS);
  CHECK_FALSE(q.stmts[0].is_output);
}

TEST_CASE("parse_prefix rejects malformed input") {
  CHECK_THROWS_AS(parse_prefix("s01 = ( +s s02 ;"), ParseError);
  CHECK_THROWS_AS(parse_prefix("s01 = ( +s s02 s03 ) ) ;"), ParseError);
  CHECK_THROWS_AS(parse_prefix("s01 = ( +s s02 s03 )"), ParseError);
  CHECK_THROWS_AS(parse_prefix("s01 = ( ^s s02 s03 ) ;"), ParseError);
  CHECK_THROWS_AS(parse_prefix("s31 = s02 ;"), ParseError);
  CHECK_THROWS_AS(parse_prefix("v16 = v02 ;"), ParseError);
  CHECK_THROWS_AS(parse_prefix(""), ParseError);
  SUBCASE("type mismatch") {
    CHECK_THROWS_AS(parse_prefix("s01 = ( +s s02 v03 ) ;"), ParseError);
    CHECK_THROWS_AS(parse_prefix("s01 = ( +v v02 v03 ) ;"), ParseError);
    CHECK_THROWS_AS(parse_prefix("v01 = ( *sv v02 s03 ) ;"), ParseError);
    CHECK_THROWS_AS(parse_prefix("s01 = ( f4v s02 s03 ) ;"), ParseError);
  }
  SUBCASE("structure") {
    // s02 is read as an input, then assigned.
    CHECK_THROWS_AS(parse_prefix("s01 = s02 ; s02 = s03 ;"), ParseError);
    // output read after its final assignment
    CHECK_THROWS_AS(parse_prefix("s01 === s02 ; s03 = s01 ;"), ParseError);
    CHECK_THROWS_AS(parse_prefix("s01 === s02 ; s01 = s03 ;"), ParseError);
  }
}

TEST_CASE("print_prefix reproduces parsed text") {
  for (const char *text :
       {"s01 === ( +s s02 s03 ) ;", kMixedA,
        "v01 = ( g1v v02 ( nv ( *sv ( f3s s01 1s ) 0v ) ) ) ; s04 === ( g2s v01 ) ; "
        "v03 === ( +v v01 ( f5v s01 s01 ) ) ;"}) {
    CHECK(print_prefix(parse_prefix(text)) == text);
  }
  // Whitespace is normalized to single spaces.
  CHECK(print_prefix(parse_prefix("  s01   ===\n( +s  s02 s03 )\t; ")) ==
        "s01 === ( +s s02 s03 ) ;");
}

TEST_CASE("pair lines use a single Y separator") {
  auto [a, b] = parse_pair("s01 === ( +s s02 s03 ) ; Y s01 === ( +s s03 s02 ) ;");
  CHECK(print_prefix(a) == "s01 === ( +s s02 s03 ) ;");
  CHECK(print_prefix(b) == "s01 === ( +s s03 s02 ) ;");
  CHECK(print_pair(a, b) == "s01 === ( +s s02 s03 ) ; Y s01 === ( +s s03 s02 ) ;");
  CHECK_THROWS_AS(parse_pair("s01 === s02 ;"), ParseError);
  CHECK_THROWS_AS(parse_pair("s01 === s02 ; Y s01 === s02 ; Y s01 === s02 ;"),
                  ParseError);
}

TEST_CASE("check_limits") {
  Program mixed = parse_prefix(kMixedA);
  // 4 + 4 + 3 + 6 nodes counted by hand (one per target plus RHS nodes).
  CHECK(mixed.node_count() == 17);
  CHECK(check_limits(mixed).ok());

  std::string big;
  for (int i = 1; i <= 21; ++i)
    big += "s01 = s02 ; ";
  Program p21 = parse_prefix(big, Limits::unlimited());
  LimitReport r = check_limits(p21);
  CHECK_FALSE(r.ok());
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].starts_with("statements"));
  CHECK_THROWS_AS(parse_prefix(big), ParseError);

  Program three = parse_prefix("s01 === s04 ; s02 === s04 ; s03 === s04 ;",
                               Limits::generalization());
  CHECK_FALSE(check_limits(three).ok());
  Limits lim;
  lim.max_outputs = 3;
  CHECK(check_limits(three, lim).ok());

  Program deep = parse_prefix(
      "s01 = ( ns ( ns ( ns ( ns ( ns ( ns s02 ) ) ) ) ) ) ;", Limits::unlimited());
  CHECK(deep.max_depth() == 7);
  CHECK_FALSE(check_limits(deep).ok());
}

TEST_CASE("node paths address the prefix tree") {
  Expr e = parse_expr("( /s s26 ( *s s27 ( ns s28 ) ) )");
  CHECK(resolve(e, *NodePath::parse("N"))->op == Op::DivS);
  CHECK(resolve(e, *NodePath::parse("Nl"))->var == var("s26"));
  CHECK(resolve(e, *NodePath::parse("Nrr"))->op == Op::NegS);
  CHECK(resolve(e, *NodePath::parse("Nrrl"))->var == var("s28"));
  CHECK(resolve(e, *NodePath::parse("Nrrr")) == nullptr);
  CHECK_FALSE(NodePath::parse("Nlrlrl"));
  CHECK_FALSE(NodePath::parse("X"));
  CHECK(NodePath::parse("Nlrlr"));
  auto paths = addressable_paths(e);
  CHECK(paths.size() == 6);
  CHECK(paths[0].str() == "N");
  CHECK(paths[1].str() == "Nl");
  CHECK(paths[2].str() == "Nr");
}

TEST_CASE("roles partition the variables") {
  Program p = parse_prefix("s05 = ( +s s01 s02 ) ; s05 = ( *s s05 s01 ) ; "
                           "s06 === ( -s s05 s02 ) ;");
  RoleMap roles = analyze_roles(p);
  CHECK(roles.role(var("s01")) == Role::Input);
  CHECK(roles.role(var("s02")) == Role::Input);
  CHECK(roles.role(var("s05")) == Role::Temp);
  CHECK(roles.role(var("s06")) == Role::Output);
  CHECK_FALSE(roles.contains(var("s03")));
  CHECK(roles.vars_with(Role::Input).size() == 2);
}

TEST_CASE("normalized source ingestion") {
  Program p = parse_normalized_source("t1 = i1 - i2 ; o1 = i2 / t1 ;");
  REQUIRE(p.size() == 2);
  CHECK_FALSE(p.stmts[0].is_output);
  CHECK(p.stmts[1].is_output);
  CHECK(print_prefix(p) == "s01 = ( -s s02 s03 ) ; s04 === ( /s s03 s01 ) ;");

  Program copy = parse_normalized_source("o1 = i1 ;");
  REQUIRE(copy.size() == 1);
  CHECK(copy.stmts[0].rhs.is_var());
  CHECK(copy.stmts[0].is_output);

  Program call = parse_normalized_source("o1 = f4v ( i1 , i2 ) ;");
  REQUIRE(call.size() == 1);
  CHECK(call.stmts[0].target.type == Type::Vector);
  CHECK(call.stmts[0].rhs.op == Op::F4v);
  CHECK(print_prefix(call) == "v01 === ( f4v s01 s02 ) ;");

  Program typed = parse_normalized_source(
      "t1 = f1v ( i1 , i2 ) ; t2 = i3 * t1 + t1 ; o1 = g1s ( t2 ) - -i1 ;");
  CHECK(print_prefix(typed) ==
        "v01 = ( f1v s01 s02 ) ; v02 = ( +v ( *sv s03 v01 ) v01 ) ; "
        "s04 === ( -s ( g1s v02 ) ( ns s01 ) ) ;");

  CHECK_THROWS_AS(parse_normalized_source("x1 = i1 ;"), ParseError);
  CHECK_THROWS_AS(parse_normalized_source("o1 = f4v ( i1 ) ;"), ParseError);
  CHECK_THROWS_AS(parse_normalized_source("o1 = i1 + ;"), ParseError);
  CHECK_THROWS_AS(parse_normalized_source("o1 = g1s ( i1 ) + f1v ( i1 , i2 ) ;"),
                  ParseError);
  CHECK_THROWS_AS(parse_normalized_source("i1 = i2 ;"), ParseError);
}

TEST_CASE("encode_rename is a seeded bijection") {
  Program p = parse_normalized_source(
      "t1 = i1 - i2 ; t2 = f2v ( t1 , i1 ) ; o1 = i2 / t1 ; o2 = i3 * t2 ;");
  Program r1 = encode_rename(p, 1);
  Program r1b = encode_rename(p, 1);
  CHECK(print_prefix(r1) == print_prefix(r1b));

  // Different seeds pick different names for t1 (s01 in canonical form).
  std::set<std::string> names;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    names.insert(encode_rename(p, seed).stmts[0].target.str());
  CHECK(names.size() > 5);

  Renaming ren = random_renaming(p, 7);
  Program q = rename_program(p, ren);
  CHECK(structural_error(q) == std::nullopt);
  EvalEnv env = EvalEnv::random(99);
  EvalEnv env2 = env;
  for (int d = 0; d < kVocabVars; ++d)
    if (ren[d])
      env2.values[ren[d]->dense()] = env.values[d];
  Outputs out = evaluate(p, env);
  Outputs out2 = evaluate(q, env2);
  REQUIRE(out.size() == 2);
  for (const auto &[v, val] : out)
    CHECK(out2.at(*ren[v.dense()]) == val);
}

TEST_CASE("evaluate over GF(2^61-1)") {
  Program cancel = parse_normalized_source("o1 = i1 - i1 ;");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Outputs o = evaluate(cancel, EvalEnv::random(seed));
    CHECK(o.begin()->second.elems == std::vector<std::uint64_t>{0});
  }

  Program p = parse_normalized_source("t1 = i1 - i2 ; o1 = i2 / t1 ;");
  // i1 -> s02, i2 -> s03 under canonical numbering.
  EvalEnv env;
  env.set(var("s02"), Value{Type::Scalar, {5}});
  env.set(var("s03"), Value{Type::Scalar, {3}});
  Outputs o = evaluate(p, env);
  // 3 * inverse(2) = 3 * 2^60 = 2^61 + 2^60 = 2^60 + 1 (mod 2^61 - 1).
  CHECK(o.at(var("s04")).elems[0] == (std::uint64_t{1} << 60) + 1);

  env.set(var("s03"), Value{Type::Scalar, {5}});
  CHECK_THROWS_AS(evaluate(p, env), DivisionByZero);

  EvalEnv missing;
  CHECK_THROWS_AS(evaluate(p, missing), MissingInput);

  Program fn = parse_prefix("v01 = ( f4v s01 s02 ) ; s03 === ( g2s v01 ) ; v02 === v01 ;");
  EvalEnv e1 = EvalEnv::random(3, 11);
  CHECK(evaluate(fn, e1) == evaluate(fn, e1));
  CHECK(evaluate(fn, e1).at(var("v02")).elems.size() == 4);
  EvalEnv e2 = e1;
  e2.func_seed = 12;
  CHECK(evaluate(fn, e1) != evaluate(fn, e2));
}

TEST_CASE("field helpers") {
  const std::uint64_t p = kMersenne61;
  CHECK(field::mul(field::inverse(2, p), 2, p) == 1);
  CHECK(field::sub(0, 1, p) == p - 1);
  CHECK(field::add(p - 1, 1, p) == 0);
  CHECK_THROWS_AS(field::inverse(0, p), DivisionByZero);
}
