// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include <algorithm>
#include <array>
#include <span>
#include <string_view>

#include "synthkit/molecule.hpp"

namespace synthkit::elements {
namespace {

constexpr std::array<std::string_view, 119> kSymbols = {
    "*",  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
    "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
    "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

constexpr std::array<int, 1> kV0 = {0};
constexpr std::array<int, 1> kV1 = {1};
constexpr std::array<int, 1> kV2 = {2};
constexpr std::array<int, 1> kV3 = {3};
constexpr std::array<int, 1> kV4 = {4};
constexpr std::array<int, 2> kV35 = {3, 5};
constexpr std::array<int, 3> kV246 = {2, 4, 6};
constexpr std::array<int, 3> kV135 = {1, 3, 5};
constexpr std::array<int, 4> kV1357 = {1, 3, 5, 7};

std::span<const int> table(int z) noexcept {
  switch (z) {
    case 1: case 3: case 11: case 19: case 9:
      return kV1;
    case 2: case 10: case 18: case 36: case 54:
      return kV0;
    case 4: case 12: case 20: case 8:
      return kV2;
    case 5: case 13: case 31:
      return kV3;
    case 6: case 14: case 32:
      return kV4;
    case 7: case 15: case 33:
      return kV35;
    case 16: case 34: case 52:
      return kV246;
    case 17: case 35:
      return kV1;
    case 53:
      return kV135;
    case 85:
      return kV1357;
    default:
      return {};
  }
}

// p-block rows in which an isoelectronic shift is meaningful.
constexpr std::array<std::pair<int, int>, 4> kRows = {{
    {5, 10}, {13, 18}, {31, 36}, {49, 54},
}};

}  // namespace

int atomic_number(std::string_view symbol) noexcept {
  for (std::size_t z = 1; z < kSymbols.size(); ++z) {
    if (kSymbols[z] == symbol) return static_cast<int>(z);
  }
  return 0;
}

std::string_view symbol(int atomic_number) noexcept {
  if (atomic_number < 0 || atomic_number >= static_cast<int>(kSymbols.size()))
    return "?";
  return kSymbols[static_cast<std::size_t>(atomic_number)];
}

std::span<const int> default_valences(int atomic_number) noexcept {
  return table(atomic_number);
}

std::span<const int> valences(int atomic_number, int charge) noexcept {
  if (charge == 0) return table(atomic_number);
  for (const auto &[lo, hi] : kRows) {
    if (atomic_number >= lo && atomic_number <= hi) {
      const int shifted = atomic_number - charge;
      if (shifted >= lo && shifted <= hi) return table(shifted);
      return {};
    }
  }
  return {};
}

bool in_organic_subset(int atomic_number, bool aromatic) noexcept {
  switch (atomic_number) {
    case 5: case 6: case 7: case 8: case 15: case 16:
      return true;
    case 9: case 17: case 35: case 53:
      return !aromatic;
    default:
      return false;
  }
}

}  // namespace synthkit::elements

namespace synthkit {

int implicit_hydrogens(int element, bool aromatic, int bond_valence_sum) noexcept {
  const auto allowed = elements::default_valences(element);
  if (allowed.empty()) return 0;
  if (bond_valence_sum > allowed.back()) return -1;
  if (aromatic) return std::max(0, allowed.front() - bond_valence_sum - 1);
  for (const int v : allowed) {
    if (v >= bond_valence_sum) return v - bond_valence_sum;
  }
  return -1;
}

}  // namespace synthkit
