// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "synthkit/errors.hpp"

namespace synthkit {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class SmilesParser {
 public:
  explicit SmilesParser(std::string_view text) : text_(text) {}

  Molecule parse() {
    if (text_.empty()) throw SyntaxError("empty SMILES", 0);
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      switch (c) {
        case '(':
          if (prev_ < 0 || pending_) throw SyntaxError("branch without a preceding atom", pos_);
          branches_.push_back(prev_);
          ++pos_;
          break;
        case ')':
          if (branches_.empty()) throw SyntaxError("unbalanced ')'", pos_);
          if (pending_) throw SyntaxError("bond before ')'", pos_);
          if (prev_ == branches_.back()) throw SyntaxError("empty branch", pos_);
          prev_ = branches_.back();
          branches_.pop_back();
          ++pos_;
          break;
        case '.':
          if (pending_) throw SyntaxError("bond before '.'", pos_);
          if (!branches_.empty()) throw SyntaxError("'.' inside a branch", pos_);
          if (prev_ < 0) throw SyntaxError("'.' without a preceding atom", pos_);
          prev_ = -1;
          ++pos_;
          break;
        case '-': case '=': case '#': case ':': case '/': case '\\': case '$':
          read_bond();
          break;
        case '%':
          read_ring_closure();
          break;
        case '[':
          add_atom(read_bracket_atom(), true);
          break;
        default:
          if (is_digit(c)) {
            read_ring_closure();
          } else {
            add_atom(read_organic_atom(), false);
          }
      }
    }
    if (!branches_.empty()) throw SyntaxError("unclosed branch", text_.size());
    if (pending_) throw SyntaxError("dangling bond", text_.size());
    if (!rings_.empty())
      throw SyntaxError("unclosed ring " + std::to_string(rings_.begin()->first),
                        rings_.begin()->second.position);
    if (prev_ < 0) throw SyntaxError("SMILES ends with '.'", text_.size());
    return finish();
  }

 private:
  struct PendingBond {
    std::optional<BondOrder> order;
    char stereo = 0;
  };
  struct RingOpen {
    int atom;
    std::optional<BondOrder> order;
    char stereo;
    std::size_t position;
  };

  void read_bond() {
    if (prev_ < 0) throw SyntaxError("bond without a preceding atom", pos_);
    if (pending_) throw SyntaxError("consecutive bond symbols", pos_);
    PendingBond p;
    switch (text_[pos_]) {
      case '-': p.order = BondOrder::kSingle; break;
      case '=': p.order = BondOrder::kDouble; break;
      case '#': p.order = BondOrder::kTriple; break;
      case ':': p.order = BondOrder::kAromatic; break;
      case '/': case '\\': p.stereo = text_[pos_]; break;
      default: throw SyntaxError("quadruple bonds are not supported", pos_);
    }
    pending_ = p;
    ++pos_;
  }

  void read_ring_closure() {
    const std::size_t start = pos_;
    if (prev_ < 0) throw SyntaxError("ring closure without a preceding atom", pos_);
    int number;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !is_digit(text_[pos_ + 1]) || !is_digit(text_[pos_ + 2]))
        throw SyntaxError("malformed '%' ring closure", pos_);
      number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = text_[pos_] - '0';
      ++pos_;
    }
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_[number] = RingOpen{prev_, pending_ ? pending_->order : std::nullopt,
                                pending_ ? pending_->stereo : char(0), start};
      pending_.reset();
      return;
    }
    const RingOpen open = it->second;
    rings_.erase(it);
    std::optional<BondOrder> order = open.order;
    char stereo = open.stereo;
    if (pending_) {
      if (pending_->order && order && *pending_->order != *order)
        throw SyntaxError("conflicting ring closure bond orders", start);
      if (pending_->order) order = pending_->order;
      if (pending_->stereo) stereo = pending_->stereo;
      pending_.reset();
    }
    if (open.atom == prev_) throw SyntaxError("ring closure to the same atom", start);
    connect(open.atom, prev_, order, stereo, start);
  }

  Atom read_organic_atom() {
    const char c = text_[pos_];
    Atom atom;
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      atom.element = 17;
      pos_ += 2;
      return atom;
    }
    if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      atom.element = 35;
      pos_ += 2;
      return atom;
    }
    switch (c) {
      case 'B': atom.element = 5; break;
      case 'C': atom.element = 6; break;
      case 'N': atom.element = 7; break;
      case 'O': atom.element = 8; break;
      case 'P': atom.element = 15; break;
      case 'S': atom.element = 16; break;
      case 'F': atom.element = 9; break;
      case 'I': atom.element = 53; break;
      case 'b': atom.element = 5; atom.aromatic = true; break;
      case 'c': atom.element = 6; atom.aromatic = true; break;
      case 'n': atom.element = 7; atom.aromatic = true; break;
      case 'o': atom.element = 8; atom.aromatic = true; break;
      case 'p': atom.element = 15; atom.aromatic = true; break;
      case 's': atom.element = 16; atom.aromatic = true; break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }
    ++pos_;
    return atom;
  }

  int read_number() {
    int value = 0;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 100000) throw SyntaxError("number too large", start);
      ++pos_;
    }
    return value;
  }

  Atom read_bracket_atom() {
    const std::size_t open = pos_++;
    Atom atom;
    auto at_end = [&] { return pos_ >= text_.size(); };
    if (at_end()) throw SyntaxError("unterminated bracket atom", open);
    if (is_digit(text_[pos_])) atom.isotope = read_number();
    if (at_end()) throw SyntaxError("unterminated bracket atom", open);

    const char c = text_[pos_];
    if (c == '*') throw SyntaxError("wildcard atoms are not valid molecules", pos_);
    if (std::islower(static_cast<unsigned char>(c))) {
      static constexpr std::pair<std::string_view, int> kAromatic[] = {
          {"se", 34}, {"as", 33}, {"te", 52}, {"b", 5}, {"c", 6},
          {"n", 7},   {"o", 8},   {"p", 15},  {"s", 16}};
      bool found = false;
      for (const auto &[sym, z] : kAromatic) {
        if (text_.substr(pos_, sym.size()) == sym) {
          atom.element = z;
          atom.aromatic = true;
          pos_ += sym.size();
          found = true;
          break;
        }
      }
      if (!found) throw SyntaxError("unknown aromatic element", pos_);
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      int z = 0;
      if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        z = elements::atomic_number(text_.substr(pos_, 2));
        if (z) pos_ += 2;
      }
      if (!z) {
        z = elements::atomic_number(text_.substr(pos_, 1));
        if (!z) throw SyntaxError("unknown element symbol", pos_);
        ++pos_;
      }
      atom.element = z;
    } else {
      throw SyntaxError("expected element symbol", pos_);
    }

    if (!at_end() && text_[pos_] == '@') {
      ++pos_;
      atom.chirality = "@";
      if (!at_end() && text_[pos_] == '@') {
        ++pos_;
        atom.chirality = "@@";
      }
    }
    if (!at_end() && text_[pos_] == 'H') {
      ++pos_;
      atom.hydrogens = (!at_end() && is_digit(text_[pos_])) ? read_number() : 1;
    }
    if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_++];
      int magnitude = 1;
      if (!at_end() && is_digit(text_[pos_])) {
        magnitude = read_number();
      } else {
        while (!at_end() && text_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      atom.charge = sign == '+' ? magnitude : -magnitude;
      if (atom.charge < -4 || atom.charge > 4) throw SyntaxError("charge out of range", pos_);
    }
    if (!at_end() && text_[pos_] == ':') {
      ++pos_;
      if (at_end() || !is_digit(text_[pos_])) throw SyntaxError("malformed atom map", pos_);
      atom.atom_map = read_number();
    }
    if (at_end() || text_[pos_] != ']') throw SyntaxError("unterminated bracket atom", open);
    ++pos_;
    return atom;
  }

  void add_atom(Atom atom, bool bracket) {
    const int index = static_cast<int>(atoms_.size());
    atoms_.push_back(std::move(atom));
    bracket_.push_back(bracket);
    if (prev_ >= 0) {
      connect(prev_, index, pending_ ? pending_->order : std::nullopt,
              pending_ ? pending_->stereo : char(0), pos_);
    }
    pending_.reset();
    prev_ = index;
  }

  void connect(int a, int b, std::optional<BondOrder> order, char stereo, std::size_t where) {
    for (const Bond &bond : bonds_) {
      if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a))
        throw SyntaxError("duplicate bond", where);
    }
    Bond bond{a, b, BondOrder::kSingle, stereo};
    bool implicit = false;
    if (order) {
      bond.order = *order;
    } else if (atoms_[static_cast<std::size_t>(a)].aromatic &&
               atoms_[static_cast<std::size_t>(b)].aromatic) {
      bond.order = BondOrder::kAromatic;
      implicit = true;
    }
    if (bond.order == BondOrder::kAromatic &&
        (!atoms_[static_cast<std::size_t>(a)].aromatic ||
         !atoms_[static_cast<std::size_t>(b)].aromatic))
      throw ValenceError("aromatic bond between non-aromatic atoms");
    bonds_.push_back(bond);
    implicit_aromatic_.push_back(implicit);
  }

  Molecule finish() {
    // An unwritten bond between aromatic atoms is aromatic only inside a ring.
    const auto ring = find_ring_bonds(atoms_.size(), bonds_);
    for (std::size_t i = 0; i < bonds_.size(); ++i) {
      if (implicit_aromatic_[i] && !ring[i]) bonds_[i].order = BondOrder::kSingle;
    }
    std::vector<int> valence(atoms_.size(), 0);
    for (const Bond &bond : bonds_) {
      valence[static_cast<std::size_t>(bond.a)] += bond_valence(bond.order);
      valence[static_cast<std::size_t>(bond.b)] += bond_valence(bond.order);
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (bracket_[i]) continue;
      const int h = implicit_hydrogens(atoms_[i].element, atoms_[i].aromatic, valence[i]);
      if (h < 0)
        throw ValenceError("atom " + std::to_string(i) + " (" +
                           std::string(elements::symbol(atoms_[i].element)) +
                           ") exceeds its maximum valence");
      atoms_[i].hydrogens = h;
    }
    Molecule mol(std::move(atoms_), std::move(bonds_), std::string(text_));
    validate_valence(mol);
    return mol;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Atom> atoms_;
  std::vector<char> bracket_;
  std::vector<Bond> bonds_;
  std::vector<char> implicit_aromatic_;
  std::map<int, RingOpen> rings_;
  std::vector<int> branches_;
  std::optional<PendingBond> pending_;
  int prev_ = -1;
};

// ---------------------------------------------------------------------------
// Canonical ranking

int bond_code(BondOrder order) { return static_cast<int>(order); }

/// Iterative invariant refinement. `keys` is any per-atom ordering key; the
/// result is a dense ranking that is stable under further refinement.
std::vector<int> refine(const Molecule &mol, const std::vector<long long> &keys) {
  const std::size_t n = mol.num_atoms();
  std::vector<int> rank(n);
  {
    std::vector<long long> sorted(keys);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t i = 0; i < n; ++i)
      rank[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
  }
  std::size_t classes = static_cast<std::size_t>(*std::max_element(rank.begin(), rank.end())) + 1;
  // Signature of atom i: its rank, then its sorted neighbor codes in
  // codes[offset[i], offset[i + 1]).
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + mol.neighbors(static_cast<int>(i)).size();
  std::vector<int> codes(offset[n]);
  std::vector<int> order(n);
  std::vector<int> next(n);
  auto less = [&](int x, int y) {
    const auto ux = static_cast<std::size_t>(x);
    const auto uy = static_cast<std::size_t>(y);
    if (rank[ux] != rank[uy]) return rank[ux] < rank[uy];
    return std::lexicographical_compare(codes.begin() + static_cast<std::ptrdiff_t>(offset[ux]),
                                        codes.begin() + static_cast<std::ptrdiff_t>(offset[ux + 1]),
                                        codes.begin() + static_cast<std::ptrdiff_t>(offset[uy]),
                                        codes.begin() + static_cast<std::ptrdiff_t>(offset[uy + 1]));
  };
  while (classes < n) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t k = offset[i];
      for (const Neighbor &nb : mol.neighbors(static_cast<int>(i)))
        codes[k++] = rank[static_cast<std::size_t>(nb.atom)] * 8 + bond_code(mol.bond(nb.bond).order);
      std::sort(codes.begin() + static_cast<std::ptrdiff_t>(offset[i]),
                codes.begin() + static_cast<std::ptrdiff_t>(offset[i + 1]));
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), less);
    int r = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0 && less(order[k - 1], order[k])) ++r;
      next[static_cast<std::size_t>(order[k])] = r;
    }
    const std::size_t new_classes = static_cast<std::size_t>(r) + 1;
    rank.swap(next);
    if (new_classes == classes) break;
    classes = new_classes;
  }
  return rank;
}

std::vector<long long> initial_invariants(const Molecule &mol) {
  const std::size_t n = mol.num_atoms();
  std::vector<std::tuple<int, int, int, int, int, int, int, int, int>> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Atom &a = mol.atoms()[i];
    const int idx = static_cast<int>(i);
    int ring_bonds = 0;
    for (const Neighbor &nb : mol.neighbors(idx)) ring_bonds += mol.bond_in_ring(nb.bond);
    inv[i] = {mol.degree(idx), a.element, a.isotope, a.aromatic, a.charge + 8,
              a.hydrogens, ring_bonds, mol.bond_valence_sum(idx), a.atom_map};
  }
  auto sorted = inv;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<long long> keys(n);
  for (std::size_t i = 0; i < n; ++i)
    keys[i] = std::lower_bound(sorted.begin(), sorted.end(), inv[i]) - sorted.begin();
  return keys;
}

// ---------------------------------------------------------------------------
// Writer

void write_atom(std::string &out, const Molecule &mol, int i) {
  const Atom &a = mol.atom(i);
  const std::string_view sym = elements::symbol(a.element);
  const bool bare = elements::in_organic_subset(a.element, a.aromatic) && a.charge == 0 &&
                    a.isotope == 0 && a.atom_map == 0 &&
                    a.hydrogens == implicit_hydrogens(a.element, a.aromatic, mol.bond_valence_sum(i));
  auto append_symbol = [&] {
    if (a.aromatic) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(sym[0]))));
      out.append(sym.substr(1));
    } else {
      out.append(sym);
    }
  };
  if (bare) {
    append_symbol();
    return;
  }
  out.push_back('[');
  if (a.isotope) out += std::to_string(a.isotope);
  append_symbol();
  if (a.hydrogens > 0) {
    out.push_back('H');
    if (a.hydrogens > 1) out += std::to_string(a.hydrogens);
  }
  if (a.charge) {
    out.push_back(a.charge > 0 ? '+' : '-');
    if (std::abs(a.charge) > 1) out += std::to_string(std::abs(a.charge));
  }
  if (a.atom_map) {
    out.push_back(':');
    out += std::to_string(a.atom_map);
  }
  out.push_back(']');
}

void write_bond(std::string &out, const Molecule &mol, int bond_index) {
  const Bond &b = mol.bond(bond_index);
  switch (b.order) {
    case BondOrder::kSingle:
      if (mol.atom(b.a).aromatic && mol.atom(b.b).aromatic) out.push_back('-');
      break;
    case BondOrder::kDouble: out.push_back('='); break;
    case BondOrder::kTriple: out.push_back('#'); break;
    case BondOrder::kAromatic:
      if (!mol.bond_in_ring(bond_index)) out.push_back(':');
      break;
  }
}

std::string ring_label(int digit) {
  if (digit < 10) return std::string(1, static_cast<char>('0' + digit));
  return "%" + std::to_string(digit);
}

/// Writes one connected molecule given a total order of its atoms.
std::string write_connected(const Molecule &mol, const std::vector<int> &rank) {
  const int n = static_cast<int>(mol.num_atoms());
  int start = 0;
  for (int i = 1; i < n; ++i)
    if (rank[static_cast<std::size_t>(i)] < rank[static_cast<std::size_t>(start)]) start = i;

  std::vector<std::vector<Neighbor>> sorted_nbrs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto nb = mol.neighbors(i);
    sorted_nbrs[static_cast<std::size_t>(i)].assign(nb.begin(), nb.end());
    std::sort(sorted_nbrs[static_cast<std::size_t>(i)].begin(), sorted_nbrs[static_cast<std::size_t>(i)].end(),
              [&](const Neighbor &x, const Neighbor &y) {
                return rank[static_cast<std::size_t>(x.atom)] < rank[static_cast<std::size_t>(y.atom)];
              });
  }

  // Pass 1: spanning tree and ring-closure bonds.
  std::vector<char> visited(static_cast<std::size_t>(n), 0), bond_seen(mol.num_bonds(), 0);
  std::vector<std::vector<Neighbor>> children(static_cast<std::size_t>(n));
  std::vector<std::vector<Neighbor>> ring_open(static_cast<std::size_t>(n)), ring_close(static_cast<std::size_t>(n));
  {
    struct Frame {
      int atom;
      std::size_t next;
    };
    std::vector<Frame> stack{{start, 0}};
    visited[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      Frame &f = stack.back();
      const auto &nbrs = sorted_nbrs[static_cast<std::size_t>(f.atom)];
      if (f.next == nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const Neighbor nb = nbrs[f.next++];
      if (bond_seen[static_cast<std::size_t>(nb.bond)]) continue;
      bond_seen[static_cast<std::size_t>(nb.bond)] = 1;
      if (visited[static_cast<std::size_t>(nb.atom)]) {
        // nb.atom is an ancestor: the ring opens there and closes here.
        ring_open[static_cast<std::size_t>(nb.atom)].push_back({f.atom, nb.bond});
        ring_close[static_cast<std::size_t>(f.atom)].push_back({nb.atom, nb.bond});
      } else {
        children[static_cast<std::size_t>(f.atom)].push_back(nb);
        visited[static_cast<std::size_t>(nb.atom)] = 1;
        stack.push_back({nb.atom, 0});
      }
    }
  }
  auto by_rank = [&](const Neighbor &x, const Neighbor &y) {
    return rank[static_cast<std::size_t>(x.atom)] < rank[static_cast<std::size_t>(y.atom)];
  };
  for (auto &v : ring_open) std::sort(v.begin(), v.end(), by_rank);
  for (auto &v : ring_close) std::sort(v.begin(), v.end(), by_rank);

  // Pass 2: emit.
  std::string out;
  std::vector<int> digit_of_bond(mol.num_bonds(), 0);
  std::vector<char> digit_used(100, 0);
  struct Frame {
    int atom;
    std::size_t next_child;
  };
  std::vector<Frame> stack;
  auto emit_atom = [&](int u) {
    write_atom(out, mol, u);
    for (const Neighbor &nb : ring_close[static_cast<std::size_t>(u)]) {
      const int d = digit_of_bond[static_cast<std::size_t>(nb.bond)];
      out += ring_label(d);
      digit_used[static_cast<std::size_t>(d)] = 0;
    }
    for (const Neighbor &nb : ring_open[static_cast<std::size_t>(u)]) {
      int d = 1;
      while (digit_used[static_cast<std::size_t>(d)]) ++d;
      digit_used[static_cast<std::size_t>(d)] = 1;
      digit_of_bond[static_cast<std::size_t>(nb.bond)] = d;
      write_bond(out, mol, nb.bond);
      out += ring_label(d);
    }
  };
  emit_atom(start);
  stack.push_back({start, 0});
  while (!stack.empty()) {
    Frame &f = stack.back();
    const auto &kids = children[static_cast<std::size_t>(f.atom)];
    if (f.next_child == kids.size()) {
      stack.pop_back();
      // Close the branch we were in, unless this atom was its parent's last child.
      if (!stack.empty()) {
        const Frame &parent = stack.back();
        if (parent.next_child < children[static_cast<std::size_t>(parent.atom)].size()) out.push_back(')');
      }
      continue;
    }
    const Neighbor nb = kids[f.next_child++];
    if (f.next_child < kids.size()) out.push_back('(');
    write_bond(out, mol, nb.bond);
    emit_atom(nb.atom);
    stack.push_back({nb.atom, 0});
  }
  return out;
}

Molecule extract(const Molecule &mol, const std::vector<int> &atoms) {
  std::vector<int> where(mol.num_atoms(), -1);
  std::vector<Atom> sub_atoms;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    where[static_cast<std::size_t>(atoms[i])] = static_cast<int>(i);
    sub_atoms.push_back(mol.atom(atoms[i]));
  }
  std::vector<Bond> sub_bonds;
  for (const Bond &b : mol.bonds()) {
    const int a = where[static_cast<std::size_t>(b.a)];
    const int c = where[static_cast<std::size_t>(b.b)];
    if (a >= 0 && c >= 0) sub_bonds.push_back({a, c, b.order, b.stereo});
  }
  return Molecule(std::move(sub_atoms), std::move(sub_bonds));
}

// Number of complete labelings explored before ties are broken greedily.
constexpr int kLeafBudget = 32;

struct CanonSearch {
  const Molecule &mol;
  std::vector<long long> root_keys;
  std::string best;
  std::vector<int> best_rank;
  std::vector<int> best_path;
  std::vector<int> first_rank;
  std::vector<int> first_path;
  std::vector<int> path;  // atoms individualized so far
  int leaves = 0;

  // Whether mapping each atom of `other` to the atom of equal rank in
  // `rank` is an automorphism that sends other_path[0..k] onto path[0..k].
  bool equivalent(const std::vector<int> &other, const std::vector<int> &other_path, const std::vector<int> &rank,
                  std::size_t k) const {
    const std::size_t n = rank.size();
    std::vector<int> at_rank(n);
    for (std::size_t i = 0; i < n; ++i) at_rank[static_cast<std::size_t>(rank[i])] = static_cast<int>(i);
    auto image = [&](int a) { return at_rank[static_cast<std::size_t>(other[static_cast<std::size_t>(a)])]; };
    for (std::size_t i = 0; i <= k; ++i)
      if (image(other_path[i]) != path[i]) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (root_keys[i] != root_keys[static_cast<std::size_t>(image(static_cast<int>(i)))]) return false;
    for (const Bond &b : mol.bonds()) {
      const int mapped = mol.bond_between(image(b.a), image(b.b));
      if (mapped < 0 || mol.bond(mapped).order != b.order) return false;
    }
    return true;
  }

  static std::size_t common_prefix(const std::vector<int> &a, const std::vector<int> &b) {
    std::size_t k = 0;
    while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
    return k;
  }

  // Explores the node reached by `path`; returns the depth at which the
  // search resumes, which is shallower than this node after an automorphism
  // shows the rest of an ancestor's child subtree repeats explored leaves.
  std::size_t run(const std::vector<long long> &keys) {
    const std::size_t depth = path.size();
    const std::vector<int> rank = refine(mol, keys);
    const std::size_t n = rank.size();
    std::vector<int> count(n, 0);
    for (const int r : rank) ++count[static_cast<std::size_t>(r)];
    int tied = -1;
    for (std::size_t r = 0; r < n; ++r) {
      if (count[r] > 1) {
        tied = static_cast<int>(r);
        break;
      }
    }
    if (tied < 0) {
      ++leaves;
      if (first_path.empty() && leaves == 1) {
        first_rank = rank;
        first_path = path;
      } else {
        for (const auto &[other, other_path] : {std::pair{&first_rank, &first_path}, std::pair{&best_rank, &best_path}}) {
          const std::size_t k = common_prefix(path, *other_path);
          if (k < depth && k < other_path->size() && equivalent(*other, *other_path, rank, k)) return k;
        }
      }
      std::string s = write_connected(mol, rank);
      if (best_rank.empty() || s < best) {
        best = std::move(s);
        best_rank = rank;
        best_path = path;
      }
      return depth;
    }
    bool first = true;
    for (std::size_t c = 0; c < n; ++c) {
      if (rank[c] != tied) continue;
      if (!first && leaves >= kLeafBudget) break;
      first = false;
      std::vector<long long> split(n);
      for (std::size_t i = 0; i < n; ++i)
        split[i] = 2LL * rank[i] + ((rank[i] == tied && i != c) ? 1 : 0);
      path.push_back(static_cast<int>(c));
      const std::size_t resume = run(split);
      path.pop_back();
      if (resume < depth) return resume;
    }
    return depth;
  }
};

struct ComponentForm {
  std::string smiles;
  std::vector<int> atoms;  // original indices, in canonical order
};

std::vector<ComponentForm> canonical_components(const Molecule &mol) {
  const auto label = mol.components();
  const int ncomp = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  std::vector<ComponentForm> forms;
  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> members;
    for (std::size_t i = 0; i < label.size(); ++i)
      if (label[i] == c) members.push_back(static_cast<int>(i));
    const Molecule sub = extract(mol, members);
    CanonSearch search{sub, initial_invariants(sub), {}, {}, {}, {}, {}, {}, 0};
    search.run(search.root_keys);
    ComponentForm form;
    form.smiles = std::move(search.best);
    form.atoms.resize(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
      form.atoms[static_cast<std::size_t>(search.best_rank[i])] = members[i];
    forms.push_back(std::move(form));
  }
  std::stable_sort(forms.begin(), forms.end(),
                   [](const ComponentForm &x, const ComponentForm &y) { return x.smiles < y.smiles; });
  return forms;
}

}  // namespace

Molecule parse_smiles(std::string_view text) { return SmilesParser(text).parse(); }

std::optional<Molecule> try_parse_smiles(std::string_view text) noexcept {
  try {
    return parse_smiles(text);
  } catch (...) {
    return std::nullopt;
  }
}

std::vector<int> canonical_ranks(const Molecule &mol) {
  std::vector<int> rank(mol.num_atoms(), 0);
  int next = 0;
  for (const ComponentForm &form : canonical_components(mol))
    for (const int atom : form.atoms) rank[static_cast<std::size_t>(atom)] = next++;
  return rank;
}

std::string canonical_smiles(const Molecule &mol) {
  std::string out;
  for (const ComponentForm &form : canonical_components(mol)) {
    if (!out.empty()) out.push_back('.');
    out += form.smiles;
  }
  return out;
}

std::optional<std::string> canonicalize(std::string_view smiles) noexcept {
  try {
    return canonical_smiles(parse_smiles(smiles));
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace synthkit
