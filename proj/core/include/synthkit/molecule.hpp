// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace synthkit {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

/// Integer valence contribution of a bond, counting aromatic bonds as 1.
/// The extra pi electron of aromatic systems is assigned by kekulization.
constexpr int bond_valence(BondOrder order) noexcept {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

struct Atom {
  int element = 6;  ///< atomic number, 1..118
  bool aromatic = false;
  int charge = 0;
  int hydrogens = 0;  ///< attached hydrogens not present as graph atoms
  int isotope = 0;    ///< 0 means natural abundance
  int atom_map = 0;   ///< 0 means unmapped
  std::string chirality;  ///< "@" / "@@" as written; never used for matching

  friend bool operator==(const Atom &, const Atom &) = default;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::kSingle;
  char stereo = 0;  ///< '/' or '\\' as written; annotation only

  int other(int atom) const noexcept { return atom == a ? b : a; }
  friend bool operator==(const Bond &, const Bond &) = default;
};

/// Neighbor entry of the adjacency list.
struct Neighbor {
  int atom;
  int bond;
};

/// Attributed molecular graph. Structural invariants (valid endpoints, no
/// self or duplicate bonds, aromatic bonds only between aromatic atoms,
/// hydrogen counts >= 0, charges in -4..+4) are checked on construction.
/// Valence rules are checked separately by validate_valence().
class Molecule {
 public:
  Molecule() = default;
  Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds,
           std::string source_text = {});

  std::size_t num_atoms() const noexcept { return atoms_.size(); }
  std::size_t num_bonds() const noexcept { return bonds_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  const std::vector<Atom> &atoms() const noexcept { return atoms_; }
  const std::vector<Bond> &bonds() const noexcept { return bonds_; }
  const Atom &atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond &bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }

  std::span<const Neighbor> neighbors(int atom) const {
    const auto lo = adj_offsets_[static_cast<std::size_t>(atom)];
    const auto hi = adj_offsets_[static_cast<std::size_t>(atom) + 1];
    return {adjacency_.data() + lo, hi - lo};
  }
  int degree(int atom) const { return static_cast<int>(neighbors(atom).size()); }

  /// Bond index between two atoms, or -1.
  int bond_between(int a, int b) const;

  bool in_ring(int atom) const { return atom_in_ring_[static_cast<std::size_t>(atom)] != 0; }
  bool bond_in_ring(int bond) const { return bond_in_ring_[static_cast<std::size_t>(bond)] != 0; }
  const std::vector<char> &ring_membership() const noexcept { return atom_in_ring_; }

  /// Sum of bond_valence() over the atom's bonds.
  int bond_valence_sum(int atom) const;

  /// Component label per atom (0-based, in order of first atom index).
  std::vector<int> components() const;

  const std::string &source_text() const noexcept { return source_text_; }

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<Neighbor> adjacency_;
  std::vector<std::size_t> adj_offsets_{0};
  std::vector<char> atom_in_ring_;
  std::vector<char> bond_in_ring_;
  std::string source_text_;
};

/// Marks ring bonds (bonds that are not bridges of the graph).
std::vector<char> find_ring_bonds(std::size_t num_atoms, std::span<const Bond> bonds);

/// Checks valence of every atom and that aromatic systems admit a Kekule
/// structure. Throws ValenceError.
void validate_valence(const Molecule &mol);

/// Molecule with atoms reordered: new atom i is old atom order[i].
Molecule permute_atoms(const Molecule &mol, std::span<const int> order);

/// Exact graph isomorphism on element, aromaticity, charge, hydrogens,
/// isotope and bond order. Stereo annotations and atom maps are ignored.
bool isomorphic(const Molecule &a, const Molecule &b);

namespace elements {

/// Atomic number for a symbol such as "C" or "Cl"; 0 if unknown.
int atomic_number(std::string_view symbol) noexcept;
std::string_view symbol(int atomic_number) noexcept;

/// Allowed valences for a neutral element, ascending; empty when unchecked.
std::span<const int> default_valences(int atomic_number) noexcept;

/// Allowed valences after the isoelectronic shift for a charged atom.
std::span<const int> valences(int atomic_number, int charge) noexcept;

/// Organic-subset element that can be written without brackets.
bool in_organic_subset(int atomic_number, bool aromatic) noexcept;

}  // namespace elements

/// Hydrogen count implied by SMILES for an unbracketed atom with the given
/// bond valence sum. Returns -1 if the bonds already exceed every allowed
/// valence.
int implicit_hydrogens(int element, bool aromatic, int bond_valence_sum) noexcept;

}  // namespace synthkit
