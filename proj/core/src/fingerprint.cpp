// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "synthkit/errors.hpp"

namespace synthkit {

Fingerprint::Fingerprint(int nbits, int radius)
    : nbits_(nbits), radius_(radius), words_(static_cast<std::size_t>((nbits + 63) / 64), 0) {
  if (nbits <= 0) throw std::invalid_argument("fingerprint width must be positive");
}

int Fingerprint::popcount() const noexcept {
  int total = 0;
  for (const std::uint64_t w : words_) total += std::popcount(w);
  return total;
}

std::vector<int> Fingerprint::on_bits() const {
  std::vector<int> bits;
  for (int i = 0; i < nbits_; ++i)
    if (test(i)) bits.push_back(i);
  return bits;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_sequence(std::span<const std::uint64_t> values, std::uint64_t seed) noexcept {
  std::uint64_t h = mix64(seed ^ values.size());
  for (const std::uint64_t v : values) h = mix64(h ^ v);
  return h;
}

std::vector<std::vector<std::uint64_t>> morgan_environments(const Molecule &mol, int radius) {
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  const std::size_t n = mol.num_atoms();
  std::vector<std::vector<std::uint64_t>> layers;
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Atom &a = mol.atoms()[i];
    const std::uint64_t inv[] = {
        static_cast<std::uint64_t>(a.element),
        static_cast<std::uint64_t>(mol.degree(static_cast<int>(i))),
        static_cast<std::uint64_t>(static_cast<std::int64_t>(a.charge)),
        static_cast<std::uint64_t>(a.hydrogens),
        static_cast<std::uint64_t>(mol.in_ring(static_cast<int>(i))),
    };
    ids[i] = hash_sequence(inv, kFingerprintSeed);
  }
  layers.push_back(ids);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
  std::vector<std::uint64_t> seq;
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      env.clear();
      for (const Neighbor &nb : mol.neighbors(static_cast<int>(i)))
        env.emplace_back(static_cast<std::uint64_t>(mol.bond(nb.bond).order),
                         ids[static_cast<std::size_t>(nb.atom)]);
      std::sort(env.begin(), env.end());
      seq.clear();
      seq.push_back(static_cast<std::uint64_t>(r));
      seq.push_back(ids[i]);
      for (const auto &[order, id] : env) {
        seq.push_back(order);
        seq.push_back(id);
      }
      next[i] = hash_sequence(seq, kFingerprintSeed);
    }
    ids.swap(next);
    layers.push_back(ids);
  }
  return layers;
}

Fingerprint morgan_fingerprint(const Molecule &mol, int radius, int nbits) {
  Fingerprint fp(nbits, radius);
  for (const auto &layer : morgan_environments(mol, radius))
    for (const std::uint64_t id : layer) fp.set(static_cast<int>(id % static_cast<std::uint64_t>(nbits)));
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (a.nbits() != b.nbits())
    throw WidthMismatch("fingerprint widths differ: " + std::to_string(a.nbits()) + " vs " +
                        std::to_string(b.nbits()));
  int both = 0;
  int either = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    both += std::popcount(wa[i] & wb[i]);
    either += std::popcount(wa[i] | wb[i]);
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

Molecule murcko_scaffold(const Molecule &mol) {
  const std::size_t n = mol.num_atoms();
  std::vector<char> keep(n, 1);
  std::vector<int> degree(n);
  for (std::size_t i = 0; i < n; ++i) degree[i] = mol.degree(static_cast<int>(i));

  // Strip terminal atoms until only rings and the paths between them remain.
  std::vector<int> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (degree[i] <= 1 && !mol.in_ring(static_cast<int>(i))) queue.push_back(static_cast<int>(i));
  while (!queue.empty()) {
    const int u = queue.back();
    queue.pop_back();
    if (!keep[static_cast<std::size_t>(u)]) continue;
    keep[static_cast<std::size_t>(u)] = 0;
    for (const Neighbor &nb : mol.neighbors(u)) {
      const auto v = static_cast<std::size_t>(nb.atom);
      if (!keep[v]) continue;
      if (--degree[v] <= 1 && !mol.in_ring(nb.atom)) queue.push_back(nb.atom);
    }
  }
  std::vector<char> framework = keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (framework[i]) continue;
    for (const Neighbor &nb : mol.neighbors(static_cast<int>(i))) {
      if (framework[static_cast<std::size_t>(nb.atom)] && mol.bond(nb.bond).order == BondOrder::kDouble &&
          mol.degree(static_cast<int>(i)) == 1)
        keep[i] = 1;
    }
  }

  std::vector<int> where(n, -1);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    where[i] = static_cast<int>(atoms.size());
    Atom a = mol.atoms()[i];
    a.chirality.clear();
    // Each removed neighbor is replaced by hydrogens to preserve valence.
    for (const Neighbor &nb : mol.neighbors(static_cast<int>(i)))
      if (!keep[static_cast<std::size_t>(nb.atom)]) a.hydrogens += bond_valence(mol.bond(nb.bond).order);
    atoms.push_back(std::move(a));
  }
  std::vector<Bond> bonds;
  for (const Bond &b : mol.bonds()) {
    const int x = where[static_cast<std::size_t>(b.a)];
    const int y = where[static_cast<std::size_t>(b.b)];
    if (x >= 0 && y >= 0) bonds.push_back({x, y, b.order, 0});
  }
  return Molecule(std::move(atoms), std::move(bonds));
}

}  // namespace synthkit
