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
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "progeq/ast.hpp"

namespace progeq {

// Probabilistic semantic oracle: programs are executed over a prime field,
// vectors are fixed-length arrays of field elements, and opaque functions
// are a keyed hash of their token and argument values. Used to falsify
// equivalence claims, never to certify them.

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

class DivisionByZero : public std::runtime_error {
public:
  DivisionByZero() : std::runtime_error("division by zero") {}
};

class MissingInput : public std::runtime_error {
public:
  explicit MissingInput(VarId v)
      : std::runtime_error("no value for input " + v.str()) {}
};

struct Value {
  Type type = Type::Scalar;
  std::vector<std::uint64_t> elems;

  friend bool operator==(const Value &, const Value &) = default;
};

struct EvalEnv {
  std::uint64_t prime = kMersenne61;
  int vector_len = 4;
  std::uint64_t func_seed = 0;
  std::array<std::optional<Value>, kVocabVars> values{};

  void set(VarId v, Value val) { values[v.dense()] = std::move(val); }

  // Uniformly random values for every variable in the vocabulary.
  static EvalEnv random(std::uint64_t seed, std::uint64_t func_seed = 0x5eed,
                        std::uint64_t prime = kMersenne61, int vector_len = 4);
};

using Outputs = std::map<VarId, Value>;

// Runs the statements in order and returns the final values of the output
// variables. Throws DivisionByZero or MissingInput.
Outputs evaluate(const Program &p, const EvalEnv &env);

// Evaluates both programs on `trials` environments derived from `seed`,
// resampling an environment when either program divides by zero. Returns
// std::nullopt when no usable environment was found, otherwise whether all
// sampled outputs agree.
std::optional<bool> semantically_agree(const Program &a, const Program &b,
                                       std::uint64_t seed, int trials = 3,
                                       int max_resamples = 20);

namespace field {
std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t inverse(std::uint64_t a, std::uint64_t p);
} // namespace field

} // namespace progeq
