// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "synthkit/molecule.hpp"

namespace synthkit {

/// Fixed-width bitset produced by folding circular atom-environment hashes.
class Fingerprint {
 public:
  Fingerprint() = default;
  Fingerprint(int nbits, int radius);

  int nbits() const noexcept { return nbits_; }
  int radius() const noexcept { return radius_; }

  bool test(int bit) const noexcept {
    return (words_[static_cast<std::size_t>(bit) >> 6] >> (bit & 63)) & 1U;
  }
  void set(int bit) noexcept {
    words_[static_cast<std::size_t>(bit) >> 6] |= std::uint64_t{1} << (bit & 63);
  }
  int popcount() const noexcept;
  std::vector<int> on_bits() const;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  friend bool operator==(const Fingerprint &, const Fingerprint &) = default;

 private:
  int nbits_ = 0;
  int radius_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Width used for building-block neighbor search.
inline constexpr int kBuildingBlockFpBits = 256;
/// Width used for target/analog similarity.
inline constexpr int kAnalogFpBits = 4096;
inline constexpr int kMorganRadius = 2;

/// Seed of the environment hash; part of the index file contract.
inline constexpr std::uint64_t kFingerprintSeed = 0x5eed'c0de'2f1a'0001ULL;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Order-sensitive hash of a sequence: h = mix(seed ^ len); h = mix(h ^ v)...
std::uint64_t hash_sequence(std::span<const std::uint64_t> values, std::uint64_t seed) noexcept;

/// Environment identifiers for radii 0..radius, one vector per radius, in
/// atom order. Exposed for tests.
std::vector<std::vector<std::uint64_t>> morgan_environments(const Molecule &mol, int radius);

/// Morgan fingerprint. Initial atom invariant: element, degree, formal charge,
/// attached hydrogens, ring flag. Each iteration hashes an atom's previous
/// identifier with the sorted (bond order, neighbor identifier) pairs. Every
/// identifier of every radius sets bit (id mod nbits).
Fingerprint morgan_fingerprint(const Molecule &mol, int radius, int nbits);

/// |A & B| / |A | B|; 1.0 when both are empty. Throws WidthMismatch.
double tanimoto(const Fingerprint &a, const Fingerprint &b);

/// Ring systems plus linkers; acyclic molecules give the empty molecule.
/// Terminal atoms doubly bonded to the framework are kept.
Molecule murcko_scaffold(const Molecule &mol);

}  // namespace synthkit
