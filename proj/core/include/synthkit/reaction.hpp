// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "synthkit/molecule.hpp"
#include "synthkit/smarts.hpp"

namespace synthkit {

struct ReactionTemplate {
  std::string id;
  std::string name;
  std::vector<Pattern> reactant_patterns;
  std::vector<Pattern> product_patterns;
  std::string smarts_text;

  std::size_t num_slots() const noexcept { return reactant_patterns.size(); }
};

/// A product of forward application together with its canonical SMILES.
struct Product {
  Molecule molecule;
  std::string smiles;
};

/// Parses "reactants>>products". Throws SyntaxError, UnsupportedFeature or
/// MapClosureError.
ReactionTemplate parse_reaction(std::string_view smirks, std::string id = {}, std::string name = {});

/// Embeddings of one reactant slot's pattern into `mol`, tagged with the slot.
std::vector<Match> reactant_matches(const ReactionTemplate &tpl, std::size_t slot, const Molecule &mol);

/// Applies the template to one molecule per slot. Returns every distinct
/// valid product, sorted by canonical SMILES. Throws SlotCountMismatch.
std::vector<Product> apply_forward(const ReactionTemplate &tpl, const std::vector<const Molecule *> &reactants);
std::vector<Product> apply_forward(const ReactionTemplate &tpl, const std::vector<Molecule> &reactants);

/// Whitespace-stripped form used to compare template text.
std::string normalize_smarts(std::string_view text);

/// An ordered, immutable collection of templates.
class TemplateSet {
 public:
  TemplateSet() = default;
  explicit TemplateSet(std::vector<ReactionTemplate> templates);

  std::size_t size() const noexcept { return templates_.size(); }
  bool empty() const noexcept { return templates_.empty(); }
  const ReactionTemplate &operator[](std::size_t i) const { return templates_[i]; }
  const std::vector<ReactionTemplate> &templates() const noexcept { return templates_; }
  auto begin() const noexcept { return templates_.begin(); }
  auto end() const noexcept { return templates_.end(); }

  /// Index of the template with this id or this (normalized) SMARTS text, or -1.
  int find(std::string_view id_or_smarts) const;

 private:
  std::vector<ReactionTemplate> templates_;
  std::map<std::string, int, std::less<>> by_id_;
  std::map<std::string, int, std::less<>> by_text_;
};

/// Reads a TSV of id, name, smirks. Blank lines and '#' comments are skipped.
/// Templates with more than two reactant slots are rejected.
TemplateSet load_templates(const std::filesystem::path &path);
TemplateSet parse_templates(std::string_view tsv, std::string_view source = "<memory>");

}  // namespace synthkit
