// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthkit/molecule.hpp"

namespace synthkit {

/// Parses a SMILES string. Unbracketed atoms receive implicit hydrogens by
/// the usual valence rules; aromaticity is taken as written (lowercase atoms)
/// and only checked for a Kekule assignment. Stereo marks are kept as
/// annotations. Throws SyntaxError or ValenceError.
Molecule parse_smiles(std::string_view text);

/// parse_smiles() without exceptions.
std::optional<Molecule> try_parse_smiles(std::string_view text) noexcept;

/// Canonical atom ranks (0..n-1, a permutation). Stereo and atom maps of
/// zero do not influence the ranking.
std::vector<int> canonical_ranks(const Molecule &mol);

/// Deterministic SMILES: isomorphic molecules give identical strings.
/// Disconnected components are written in lexicographic order. Stereo
/// annotations are not emitted.
std::string canonical_smiles(const Molecule &mol);

/// Canonical SMILES of a string, or nullopt if it does not parse.
std::optional<std::string> canonicalize(std::string_view smiles) noexcept;

}  // namespace synthkit
