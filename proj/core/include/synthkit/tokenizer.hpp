// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace synthkit {

/// Splits SMILES text into tokens. Cl and Br, bracket atoms and '%nn' ring
/// closures are single tokens; every other character is its own token.
/// Never fails: invalid input still tokenizes.
std::vector<std::string> tokenize_smiles(std::string_view text);

/// Consecutive token runs of length n, each joined with a single space.
std::vector<std::string> token_ngrams(const std::vector<std::string> &tokens, std::size_t n);

}  // namespace synthkit
