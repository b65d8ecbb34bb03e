// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "synthkit/fingerprint.hpp"
#include "synthkit/molecule.hpp"
#include "synthkit/reaction.hpp"

namespace synthkit {

struct LibraryEntry {
  std::string id;
  std::string smiles;
  std::string canonical;
  Molecule molecule;
  Fingerprint fingerprint;  // 256-bit, radius 2
};

/// Building-block library. Entries are unique by canonical SMILES; the entry
/// index is the document id used by the retrieval indexes.
class BuildingBlockLibrary {
 public:
  BuildingBlockLibrary() = default;

  /// Builds from (id, smiles) records. Unparseable records and canonical
  /// duplicates are skipped and reported by diagnostics().
  static BuildingBlockLibrary from_records(const std::vector<std::pair<std::string, std::string>> &records);
  /// Reads "SMILES[<TAB>id]" lines; '#' starts a comment line. Throws IoError.
  static BuildingBlockLibrary load(const std::filesystem::path &path);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const LibraryEntry &operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<LibraryEntry> &entries() const noexcept { return entries_; }

  /// Entry index with this canonical SMILES, or -1.
  int find(std::string_view canonical) const;
  bool contains(std::string_view canonical) const { return find(canonical) >= 0; }

  /// Copy of the library without the entries whose canonical SMILES is listed.
  BuildingBlockLibrary without(const std::vector<std::string> &canonical) const;

  const std::vector<std::string> &diagnostics() const noexcept { return diagnostics_; }

 private:
  void add(std::string id, std::string smiles, Molecule mol, std::string canonical);

  std::vector<LibraryEntry> entries_;
  std::unordered_map<std::string, int> by_canonical_;
  std::vector<std::string> diagnostics_;
};

/// Library entries with at least one match for the template slot, ascending.
std::vector<int> compatible_bbs(const BuildingBlockLibrary &library, const ReactionTemplate &tpl, std::size_t slot);

}  // namespace synthkit
