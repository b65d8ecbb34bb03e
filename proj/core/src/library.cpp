// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/library.hpp"

#include <fstream>
#include <set>

#include "synthkit/errors.hpp"
#include "synthkit/smiles.hpp"

namespace synthkit {

void BuildingBlockLibrary::add(std::string id, std::string smiles, Molecule mol, std::string canonical) {
  by_canonical_.emplace(canonical, static_cast<int>(entries_.size()));
  Fingerprint fp = morgan_fingerprint(mol, kMorganRadius, kBuildingBlockFpBits);
  entries_.push_back({std::move(id), std::move(smiles), std::move(canonical), std::move(mol), std::move(fp)});
}

BuildingBlockLibrary BuildingBlockLibrary::from_records(
    const std::vector<std::pair<std::string, std::string>> &records) {
  BuildingBlockLibrary lib;
  for (const auto &[id, smiles] : records) {
    std::optional<Molecule> mol = try_parse_smiles(smiles);
    if (!mol) {
      lib.diagnostics_.push_back("skipped unparseable building block " + id + ": " + smiles);
      continue;
    }
    std::string canonical = canonical_smiles(*mol);
    if (lib.by_canonical_.count(canonical)) {
      lib.diagnostics_.push_back("skipped duplicate building block " + id + ": " + smiles);
      continue;
    }
    lib.add(id, smiles, std::move(*mol), std::move(canonical));
  }
  return lib;
}

BuildingBlockLibrary BuildingBlockLibrary::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open building-block library " + path.string());
  std::vector<std::pair<std::string, std::string>> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::size_t tab = line.find('\t', first);
    std::string smiles = line.substr(first, tab == std::string::npos ? std::string::npos : tab - first);
    while (!smiles.empty() && smiles.back() == ' ') smiles.pop_back();
    std::string id = tab == std::string::npos ? "" : line.substr(tab + 1);
    if (id.empty()) id = "bb" + std::to_string(lineno);
    records.emplace_back(std::move(id), std::move(smiles));
  }
  return from_records(records);
}

int BuildingBlockLibrary::find(std::string_view canonical) const {
  auto it = by_canonical_.find(std::string(canonical));
  return it == by_canonical_.end() ? -1 : it->second;
}

BuildingBlockLibrary BuildingBlockLibrary::without(const std::vector<std::string> &canonical) const {
  const std::set<std::string> drop(canonical.begin(), canonical.end());
  BuildingBlockLibrary lib;
  for (const LibraryEntry &e : entries_) {
    if (drop.count(e.canonical)) continue;
    lib.by_canonical_.emplace(e.canonical, static_cast<int>(lib.entries_.size()));
    lib.entries_.push_back(e);
  }
  return lib;
}

std::vector<int> compatible_bbs(const BuildingBlockLibrary &library, const ReactionTemplate &tpl, std::size_t slot) {
  std::vector<int> out;
  const Pattern &pattern = tpl.reactant_patterns.at(slot);
  for (std::size_t i = 0; i < library.size(); ++i)
    if (has_substructure(pattern, library[i].molecule)) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace synthkit
