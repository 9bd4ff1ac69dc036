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
#include <string_view>

#include "progeq/ast.hpp"
#include "progeq/program.hpp"

namespace progeq {

// Variable renaming: dense VarId -> replacement (unset entries are kept).
using Renaming = std::array<std::optional<VarId>, kVocabVars>;

Program rename_program(const Program &p, const Renaming &r);

// Bijection from the variables of `p` onto pseudo-randomly chosen tokens of
// the same type. Deterministic per seed.
Renaming random_renaming(const Program &p, std::uint64_t seed);

// A bijection of the whole variable vocabulary onto itself, per type.
Renaming random_permutation(std::uint64_t seed);

Program encode_rename(const Program &p, std::uint64_t seed);

// Parses the normalized infix mini-language, e.g.
//   "t1 = i1 - i2 ; o1 = i2 / t1 ;"
// Names must come from the i*, t* and o* families; the final assignment of
// every o* variable is flagged as an output. Variable types are inferred
// from operator and function signatures (unconstrained names are scalar).
// Without a seed, variables are numbered in order of first appearance
// (s01, s02, ... / v01, ...); with a seed the Encode renaming is applied.
Program parse_normalized_source(std::string_view text,
                                const Limits &limits = {},
                                std::optional<std::uint64_t> encode_seed = {});

} // namespace progeq
