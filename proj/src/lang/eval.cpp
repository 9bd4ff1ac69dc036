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

#include "progeq/eval.hpp"

#include "progeq/program.hpp"
#include "progeq/random.hpp"

namespace progeq {

namespace field {

std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  std::uint64_t s = a + b;
  return s >= p ? s - p : s;
}

std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return a >= b ? a - b : a + (p - b);
}

std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t inverse(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0)
    throw DivisionByZero();
  std::uint64_t result = 1, base = a % p, e = p - 2;
  while (e) {
    if (e & 1)
      result = mul(result, base, p);
    base = mul(base, base, p);
    e >>= 1;
  }
  return result;
}

} // namespace field

EvalEnv EvalEnv::random(std::uint64_t seed, std::uint64_t func_seed,
                        std::uint64_t prime, int vector_len) {
  EvalEnv env;
  env.prime = prime;
  env.vector_len = vector_len;
  env.func_seed = func_seed;
  Rng rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, prime - 1);
  for (int i = 0; i < kVocabVars; ++i) {
    VarId v = VarId::from_dense(i);
    Value val{v.type, {}};
    int n = v.type == Type::Scalar ? 1 : vector_len;
    for (int j = 0; j < n; ++j)
      val.elems.push_back(dist(rng));
    env.values[i] = std::move(val);
  }
  return env;
}

namespace {

class Evaluator {
public:
  Evaluator(const EvalEnv &env) : env_(env), p_(env.prime) {}

  std::array<std::optional<Value>, kVocabVars> state;

  Value eval(const Expr &e) {
    switch (e.op) {
    case Op::Var: {
      auto &slot = state[e.var.dense()];
      if (!slot) {
        const auto &in = env_.values[e.var.dense()];
        if (!in)
          throw MissingInput(e.var);
        slot = *in;
      }
      return *slot;
    }
    case Op::ZeroS:
      return scalar(0);
    case Op::OneS:
      return scalar(1);
    case Op::ZeroV:
      return Value{Type::Vector, std::vector<std::uint64_t>(env_.vector_len, 0)};
    case Op::AddS:
    case Op::AddV:
      return zip(eval(e.args[0]), eval(e.args[1]), field::add);
    case Op::SubS:
    case Op::SubV:
      return zip(eval(e.args[0]), eval(e.args[1]), field::sub);
    case Op::MulS:
      return zip(eval(e.args[0]), eval(e.args[1]), field::mul);
    case Op::DivS: {
      Value a = eval(e.args[0]);
      Value b = eval(e.args[1]);
      a.elems[0] = field::mul(a.elems[0], field::inverse(b.elems[0], p_), p_);
      return a;
    }
    case Op::NegS:
    case Op::NegV: {
      Value a = eval(e.args[0]);
      for (auto &x : a.elems)
        x = field::sub(0, x, p_);
      return a;
    }
    case Op::MulSV: {
      Value s = eval(e.args[0]);
      Value v = eval(e.args[1]);
      for (auto &x : v.elems)
        x = field::mul(s.elems[0], x, p_);
      return v;
    }
    default:
      return call(e);
    }
  }

private:
  Value scalar(std::uint64_t x) const { return Value{Type::Scalar, {x}}; }

  template <typename F> Value zip(Value a, const Value &b, F f) const {
    for (std::size_t i = 0; i < a.elems.size(); ++i)
      a.elems[i] = f(a.elems[i], b.elems[i], p_);
    return a;
  }

  Value call(const Expr &e) {
    std::uint64_t h = splitmix64(env_.func_seed ^
                                 (static_cast<std::uint64_t>(e.op) << 48));
    for (const Expr &a : e.args)
      for (std::uint64_t x : eval(a).elems)
        h = splitmix64(h ^ x);
    const OpInfo &info = op_info(e.op);
    Value out{info.result, {}};
    int n = info.result == Type::Scalar ? 1 : env_.vector_len;
    for (int i = 0; i < n; ++i)
      out.elems.push_back(splitmix64(h + static_cast<std::uint64_t>(i)) % p_);
    return out;
  }

  const EvalEnv &env_;
  std::uint64_t p_;
};

} // namespace

Outputs evaluate(const Program &p, const EvalEnv &env) {
  Evaluator ev(env);
  for (const Stmt &s : p.stmts) {
    Value v = ev.eval(s.rhs);
    ev.state[s.target.dense()] = std::move(v);
  }
  Outputs out;
  for (const Stmt &s : p.stmts)
    if (s.is_output)
      out[s.target] = *ev.state[s.target.dense()];
  return out;
}

std::optional<bool> semantically_agree(const Program &a, const Program &b,
                                       std::uint64_t seed, int trials,
                                       int max_resamples) {
  int done = 0;
  std::uint64_t attempt = 0;
  for (int tries = 0; done < trials && tries < trials + max_resamples; ++tries) {
    EvalEnv env = EvalEnv::random(derive_seed(seed, attempt),
                                  derive_seed(seed ^ 0xf00d, attempt));
    ++attempt;
    Outputs oa, ob;
    try {
      oa = evaluate(a, env);
      ob = evaluate(b, env);
    } catch (const DivisionByZero &) {
      continue;
    }
    if (oa != ob)
      return false;
    ++done;
  }
  if (done < trials)
    return std::nullopt;
  return true;
}

} // namespace progeq
