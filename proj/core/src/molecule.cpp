// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/molecule.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "synthkit/errors.hpp"

namespace synthkit {

Molecule::Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds,
                   std::string source_text)
    : atoms_(std::move(atoms)),
      bonds_(std::move(bonds)),
      source_text_(std::move(source_text)) {
  const int n = static_cast<int>(atoms_.size());
  for (const Atom &atom : atoms_) {
    if (atom.element < 1 || atom.element > 118)
      throw std::invalid_argument("atomic number out of range: " +
                                  std::to_string(atom.element));
    if (atom.hydrogens < 0)
      throw std::invalid_argument("negative hydrogen count");
    if (atom.charge < -4 || atom.charge > 4)
      throw ValenceError("formal charge out of range: " + std::to_string(atom.charge));
  }

  std::vector<std::size_t> counts(atoms_.size() + 1, 0);
  for (const Bond &bond : bonds_) {
    if (bond.a < 0 || bond.b < 0 || bond.a >= n || bond.b >= n)
      throw std::invalid_argument("bond endpoint out of range");
    if (bond.a == bond.b) throw std::invalid_argument("self bond");
    if (bond.order == BondOrder::kAromatic &&
        (!atoms_[static_cast<std::size_t>(bond.a)].aromatic ||
         !atoms_[static_cast<std::size_t>(bond.b)].aromatic))
      throw ValenceError("aromatic bond between non-aromatic atoms");
    ++counts[static_cast<std::size_t>(bond.a) + 1];
    ++counts[static_cast<std::size_t>(bond.b) + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  adj_offsets_ = counts;
  adjacency_.resize(bonds_.size() * 2);
  std::vector<std::size_t> fill(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (std::size_t i = 0; i < bonds_.size(); ++i) {
    const Bond &bond = bonds_[i];
    adjacency_[fill[static_cast<std::size_t>(bond.a)]++] = {bond.b, static_cast<int>(i)};
    adjacency_[fill[static_cast<std::size_t>(bond.b)]++] = {bond.a, static_cast<int>(i)};
  }
  for (int i = 0; i < n; ++i) {
    auto nbrs = neighbors(i);
    for (std::size_t x = 0; x < nbrs.size(); ++x)
      for (std::size_t y = x + 1; y < nbrs.size(); ++y)
        if (nbrs[x].atom == nbrs[y].atom)
          throw std::invalid_argument("duplicate bond between atoms " +
                                      std::to_string(i) + " and " +
                                      std::to_string(nbrs[x].atom));
  }

  bond_in_ring_ = find_ring_bonds(atoms_.size(), bonds_);
  atom_in_ring_.assign(atoms_.size(), 0);
  for (std::size_t i = 0; i < bonds_.size(); ++i) {
    if (bond_in_ring_[i]) {
      atom_in_ring_[static_cast<std::size_t>(bonds_[i].a)] = 1;
      atom_in_ring_[static_cast<std::size_t>(bonds_[i].b)] = 1;
    }
  }
}

int Molecule::bond_between(int a, int b) const {
  for (const Neighbor &nb : neighbors(a))
    if (nb.atom == b) return nb.bond;
  return -1;
}

int Molecule::bond_valence_sum(int atom) const {
  int sum = 0;
  for (const Neighbor &nb : neighbors(atom)) sum += bond_valence(bond(nb.bond).order);
  return sum;
}

std::vector<int> Molecule::components() const {
  std::vector<int> label(atoms_.size(), -1);
  int next = 0;
  std::vector<int> stack;
  for (int start = 0; start < static_cast<int>(atoms_.size()); ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0) continue;
    label[static_cast<std::size_t>(start)] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const Neighbor &nb : neighbors(u)) {
        if (label[static_cast<std::size_t>(nb.atom)] < 0) {
          label[static_cast<std::size_t>(nb.atom)] = next;
          stack.push_back(nb.atom);
        }
      }
    }
    ++next;
  }
  return label;
}

std::vector<char> find_ring_bonds(std::size_t num_atoms, std::span<const Bond> bonds) {
  // Tarjan bridge finding; every non-bridge bond lies on a cycle.
  std::vector<std::vector<std::pair<int, int>>> adj(num_atoms);
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    adj[static_cast<std::size_t>(bonds[i].a)].push_back({bonds[i].b, static_cast<int>(i)});
    adj[static_cast<std::size_t>(bonds[i].b)].push_back({bonds[i].a, static_cast<int>(i)});
  }
  std::vector<char> ring(bonds.size(), 1);
  std::vector<int> disc(num_atoms, -1), low(num_atoms, 0);
  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (std::size_t root = 0; root < num_atoms; ++root) {
    if (disc[root] >= 0) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({static_cast<int>(root), -1, 0});
    while (!stack.empty()) {
      Frame &f = stack.back();
      const auto u = static_cast<std::size_t>(f.atom);
      if (f.next < adj[u].size()) {
        const auto [v, bi] = adj[u][f.next++];
        if (bi == f.parent_bond) continue;
        const auto vs = static_cast<std::size_t>(v);
        if (disc[vs] < 0) {
          disc[vs] = low[vs] = timer++;
          stack.push_back({v, bi, 0});
        } else {
          low[u] = std::min(low[u], disc[vs]);
        }
      } else {
        const int pb = f.parent_bond;
        stack.pop_back();
        if (!stack.empty()) {
          const auto p = static_cast<std::size_t>(stack.back().atom);
          low[p] = std::min(low[p], low[u]);
          if (low[u] > disc[p]) ring[static_cast<std::size_t>(pb)] = 0;
        }
      }
    }
  }
  return ring;
}

namespace {

// Finds a perfect matching of `need` atoms over aromatic bonds by
// backtracking, always extending the atom with the fewest free partners.
bool match_pi(const Molecule &mol, std::vector<int> &mate, const std::vector<char> &need) {
  int best = -1;
  int best_options = 1 << 30;
  for (int i = 0; i < static_cast<int>(mol.num_atoms()); ++i) {
    if (!need[static_cast<std::size_t>(i)] || mate[static_cast<std::size_t>(i)] >= 0) continue;
    int options = 0;
    for (const Neighbor &nb : mol.neighbors(i)) {
      if (mol.bond(nb.bond).order == BondOrder::kAromatic &&
          need[static_cast<std::size_t>(nb.atom)] && mate[static_cast<std::size_t>(nb.atom)] < 0)
        ++options;
    }
    if (options < best_options) {
      best = i;
      best_options = options;
    }
  }
  if (best < 0) return true;
  if (best_options == 0) return false;
  for (const Neighbor &nb : mol.neighbors(best)) {
    const auto v = static_cast<std::size_t>(nb.atom);
    if (mol.bond(nb.bond).order != BondOrder::kAromatic || !need[v] || mate[v] >= 0) continue;
    mate[static_cast<std::size_t>(best)] = nb.atom;
    mate[v] = best;
    if (match_pi(mol, mate, need)) return true;
    mate[static_cast<std::size_t>(best)] = -1;
    mate[v] = -1;
  }
  return false;
}

}  // namespace

void validate_valence(const Molecule &mol) {
  const auto n = mol.num_atoms();
  std::vector<char> need(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Atom &atom = mol.atoms()[i];
    const auto allowed = elements::valences(atom.element, atom.charge);
    const int used = mol.bond_valence_sum(static_cast<int>(i)) + atom.hydrogens;
    if (allowed.empty()) continue;
    if (used > allowed.back())
      throw ValenceError("atom " + std::to_string(i) + " (" +
                         std::string(elements::symbol(atom.element)) +
                         ") exceeds its maximum valence");
    if (atom.aromatic) {
      const auto it = std::lower_bound(allowed.begin(), allowed.end(), used);
      if (it != allowed.end() && *it - used >= 1) need[i] = 1;
    }
  }
  std::vector<int> mate(n, -1);
  if (!match_pi(mol, mate, need))
    throw ValenceError("aromatic system has no Kekule structure");
  for (std::size_t i = 0; i < n; ++i) {
    if (mate[i] < 0) continue;
    const Atom &atom = mol.atoms()[i];
    const auto allowed = elements::valences(atom.element, atom.charge);
    const int used = mol.bond_valence_sum(static_cast<int>(i)) + atom.hydrogens + 1;
    if (used > allowed.back())
      throw ValenceError("atom " + std::to_string(i) + " exceeds its maximum valence");
  }
}

Molecule permute_atoms(const Molecule &mol, std::span<const int> order) {
  if (order.size() != mol.num_atoms()) throw std::invalid_argument("permutation size mismatch");
  std::vector<int> where(order.size(), -1);
  std::vector<Atom> atoms;
  atoms.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    where[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    atoms.push_back(mol.atom(order[i]));
  }
  std::vector<Bond> bonds;
  bonds.reserve(mol.num_bonds());
  for (const Bond &b : mol.bonds()) {
    Bond nb = b;
    nb.a = where[static_cast<std::size_t>(b.a)];
    nb.b = where[static_cast<std::size_t>(b.b)];
    bonds.push_back(nb);
  }
  return Molecule(std::move(atoms), std::move(bonds), mol.source_text());
}

namespace {

auto atom_key(const Molecule &m, int i) {
  const Atom &a = m.atom(i);
  return std::tuple(a.element, a.aromatic, a.charge, a.hydrogens, a.isotope, m.degree(i));
}

}  // namespace

bool isomorphic(const Molecule &a, const Molecule &b) {
  const int n = static_cast<int>(a.num_atoms());
  if (a.num_atoms() != b.num_atoms() || a.num_bonds() != b.num_bonds()) return false;
  std::vector<decltype(atom_key(a, 0))> ka, kb;
  for (int i = 0; i < n; ++i) {
    ka.push_back(atom_key(a, i));
    kb.push_back(atom_key(b, i));
  }
  {
    auto sa = ka, sb = kb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
  }
  // Visit atoms of `a` in BFS order so each atom after a component root has
  // an already-mapped neighbor that bounds its candidates.
  std::vector<int> order;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < n; ++r) {
    if (seen[static_cast<std::size_t>(r)]) continue;
    seen[static_cast<std::size_t>(r)] = 1;
    std::size_t head = order.size();
    order.push_back(r);
    while (head < order.size()) {
      const int u = order[head++];
      for (const Neighbor &nb : a.neighbors(u)) {
        if (!seen[static_cast<std::size_t>(nb.atom)]) {
          seen[static_cast<std::size_t>(nb.atom)] = 1;
          order.push_back(nb.atom);
        }
      }
    }
  }
  std::vector<int> map(static_cast<std::size_t>(n), -1), used(static_cast<std::size_t>(n), 0);
  std::function<bool(std::size_t)> extend = [&](std::size_t depth) -> bool {
    if (depth == order.size()) return true;
    const int u = order[depth];
    for (int v = 0; v < n; ++v) {
      if (used[static_cast<std::size_t>(v)] || ka[static_cast<std::size_t>(u)] != kb[static_cast<std::size_t>(v)])
        continue;
      bool ok = true;
      for (const Neighbor &nb : a.neighbors(u)) {
        const int mv = map[static_cast<std::size_t>(nb.atom)];
        if (mv < 0) continue;
        const int bb = b.bond_between(v, mv);
        if (bb < 0 || b.bond(bb).order != a.bond(nb.bond).order) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      map[static_cast<std::size_t>(u)] = v;
      used[static_cast<std::size_t>(v)] = 1;
      if (extend(depth + 1)) return true;
      map[static_cast<std::size_t>(u)] = -1;
      used[static_cast<std::size_t>(v)] = 0;
    }
    return false;
  };
  return extend(0);
}

}  // namespace synthkit
