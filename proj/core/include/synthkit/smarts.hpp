// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synthkit/molecule.hpp"

namespace synthkit {

class Pattern;

/// Atom predicate tree. Leaves test one property of a molecule atom.
struct AtomQuery {
  enum class Kind : std::uint8_t {
    kTrue,          // '*', also stereo marks which are ignored
    kElement,       // value = atomic number, aromatic_spec: 0 aliphatic, 1 aromatic, 2 either
    kAromatic,      // 'a'
    kAliphatic,     // 'A'
    kHydrogens,     // 'H<n>': total attached hydrogens
    kDegree,        // 'D<n>': explicit connections
    kConnectivity,  // 'X<n>': connections including hydrogens
    kCharge,        // '+<n>' / '-<n>'
    kInRing,        // 'R' (value 1) / 'R0' (value 0)
    kIsotope,
    kRecursive,     // '$(...)'
    kNot,
    kAnd,
    kOr,
  };

  Kind kind = Kind::kTrue;
  int value = 0;
  int aromatic_spec = 2;
  std::vector<AtomQuery> children;
  std::shared_ptr<const Pattern> recursive;

  /// Properties fixed by the top-level conjunction, used when a pattern atom
  /// has to be turned into a real atom (product side of a reaction).
  std::optional<int> pinned_element() const;
  std::optional<bool> pinned_aromatic() const;
  std::optional<int> pinned_charge() const;
  std::optional<int> pinned_hydrogens() const;
};

struct BondQuery {
  enum class Kind : std::uint8_t {
    kDefault,  // unwritten: single or aromatic
    kSingle,
    kDouble,
    kTriple,
    kAromatic,
    kAny,   // '~'
    kRing,  // '@'
    kNot,
    kAnd,
    kOr,
  };

  Kind kind = Kind::kDefault;
  std::vector<BondQuery> children;

  /// Bond order when the query is exactly one of -, =, #, :.
  std::optional<BondOrder> pinned_order() const;
};

struct PatternAtom {
  AtomQuery query;
  int atom_map = 0;
};

struct PatternBond {
  int a = 0;
  int b = 0;
  BondQuery query;
};

/// Parsed SMARTS pattern. Immutable once constructed.
class Pattern {
 public:
  Pattern(std::vector<PatternAtom> atoms, std::vector<PatternBond> bonds, std::string text);

  std::size_t num_atoms() const noexcept { return atoms_.size(); }
  const std::vector<PatternAtom> &atoms() const noexcept { return atoms_; }
  const std::vector<PatternBond> &bonds() const noexcept { return bonds_; }
  const PatternAtom &atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const std::string &text() const noexcept { return text_; }
  int num_components() const noexcept { return num_components_; }

  /// Pattern atom carrying the given map number, or -1.
  int atom_with_map(int map) const noexcept;
  /// Index of the bond between two pattern atoms, or -1.
  int bond_between(int a, int b) const noexcept;

  // Search plan: atoms in BFS order per component, each non-root atom with
  // the earlier atom it is reached from.
  const std::vector<int> &search_order() const noexcept { return order_; }
  const std::vector<int> &search_parent() const noexcept { return parent_; }
  /// For each atom in search order, bonds to atoms earlier in the order.
  const std::vector<std::vector<std::pair<int, int>>> &back_bonds() const noexcept { return back_; }

 private:
  std::vector<PatternAtom> atoms_;
  std::vector<PatternBond> bonds_;
  std::string text_;
  int num_components_ = 0;
  std::vector<int> order_;
  std::vector<int> parent_;
  std::vector<std::vector<std::pair<int, int>>> back_;
};

/// One embedding of a pattern: atom_assignment[pattern atom] = molecule atom.
struct Match {
  std::vector<int> atom_assignment;
  int slot = 0;

  friend bool operator==(const Match &, const Match &) = default;
  friend auto operator<=>(const Match &, const Match &) = default;
};

/// Parses the supported SMARTS subset: organic and bracket atoms, '*', 'A',
/// 'a', '#n', H/D/X counts, charges, R/R0, isotopes, '!', '&', ',', ';',
/// recursive '$(...)', bonds - = # : ~ @ (and / \ as single), ring closures,
/// branches, '.', and atom maps. Throws SyntaxError or UnsupportedFeature.
Pattern parse_smarts(std::string_view text);

bool atom_matches(const AtomQuery &query, const Molecule &mol, int atom);
bool bond_matches(const BondQuery &query, const Molecule &mol, int bond);

/// All injective embeddings, sorted by assignment tuple.
std::vector<Match> match_substructure(const Pattern &pattern, const Molecule &mol);

/// True if at least one embedding exists.
bool has_substructure(const Pattern &pattern, const Molecule &mol);

}  // namespace synthkit
