#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "synthkit/errors.hpp"
#include "synthkit/fingerprint.hpp"
#include "synthkit/smiles.hpp"

using namespace synthkit;

namespace {

Fingerprint fp_from_bits(int nbits, std::initializer_list<int> bits) {
  Fingerprint fp(nbits, 2);
  for (const int b : bits) fp.set(b);
  return fp;
}

Fingerprint random_fp(std::mt19937 &rng, int nbits) {
  Fingerprint fp(nbits, 2);
  std::bernoulli_distribution coin(0.1);
  for (int i = 0; i < nbits; ++i)
    if (coin(rng)) fp.set(i);
  return fp;
}

}  // namespace

TEST_CASE("tanimoto set arithmetic") {
  const auto a = fp_from_bits(256, {1, 2});
  const auto b = fp_from_bits(256, {2, 3});
  CHECK(tanimoto(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(tanimoto(a, a) == 1.0);
  CHECK(tanimoto(fp_from_bits(256, {1}), fp_from_bits(256, {2})) == 0.0);
  CHECK(tanimoto(Fingerprint(256, 2), Fingerprint(256, 2)) == 1.0);
  CHECK_THROWS_AS(tanimoto(Fingerprint(256, 2), Fingerprint(4096, 2)), WidthMismatch);
}

TEST_CASE("tanimoto is symmetric, bounded, and 1 iff equal") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_fp(rng, 256);
    const auto b = trial % 7 == 0 ? a : random_fp(rng, 256);
    const double ab = tanimoto(a, b);
    CHECK(ab == tanimoto(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK((ab == 1.0) == (a == b));
  }
}

TEST_CASE("morgan fingerprint is permutation invariant and deterministic") {
  std::mt19937 rng(3);
  for (const char *s : {"CC(=O)Nc1ccc(O)cc1", "OB(O)c1ccc(F)cc1", "C1CCNCC1", "CCO"}) {
    const Molecule m = parse_smiles(s);
    const auto fp = morgan_fingerprint(m, 2, 4096);
    CHECK(fp == morgan_fingerprint(m, 2, 4096));
    for (int t = 0; t < 20; ++t) {
      std::vector<int> order(m.num_atoms());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      CHECK(morgan_fingerprint(permute_atoms(m, order), 2, 4096) == fp);
    }
  }
}

TEST_CASE("methane and ethane fingerprints differ") {
  CHECK(morgan_fingerprint(parse_smiles("C"), 2, 4096) !=
        morgan_fingerprint(parse_smiles("CC"), 2, 4096));
}

TEST_CASE("radius 0 environments of ethanol") {
  // CH3 (degree 1, 3 H), CH2 (degree 2, 2 H) and OH are three distinct
  // environments, so at most three bits can be set.
  const auto layers = morgan_environments(parse_smiles("CCO"), 0);
  REQUIRE(layers.size() == 1);
  std::set<std::uint64_t> distinct(layers[0].begin(), layers[0].end());
  CHECK(distinct.size() == 3);
  CHECK(morgan_fingerprint(parse_smiles("CCO"), 0, 4096).popcount() <= 3);
  // Two identical CH3 groups collapse to one environment.
  const auto ethane = morgan_environments(parse_smiles("CC"), 0);
  CHECK(ethane[0][0] == ethane[0][1]);
}

TEST_CASE("fingerprint widths") {
  const Molecule m = parse_smiles("c1ccccc1CN");
  const auto fp = morgan_fingerprint(m, 2, kBuildingBlockFpBits);
  CHECK(fp.nbits() == 256);
  CHECK(fp.radius() == 2);
  CHECK(fp.popcount() <= 256);
  CHECK(fp.popcount() > 0);
}

TEST_CASE("murcko scaffolds") {
  CHECK(canonical_smiles(murcko_scaffold(parse_smiles("c1ccccc1"))) == "c1ccccc1");
  CHECK(canonical_smiles(murcko_scaffold(parse_smiles("Cc1ccccc1"))) == "c1ccccc1");
  CHECK(murcko_scaffold(parse_smiles("CCO")).empty());
  CHECK(canonical_smiles(murcko_scaffold(parse_smiles("Cn1cccc1"))) ==
        canonical_smiles(parse_smiles("c1cc[nH]c1")));
  CHECK(canonical_smiles(murcko_scaffold(parse_smiles("CCC1CCC(=O)CC1"))) ==
        canonical_smiles(parse_smiles("O=C1CCCCC1")));
  // Linker between two rings survives, side chains do not.
  CHECK(canonical_smiles(murcko_scaffold(parse_smiles("CCc1ccc(CCc2ccccc2)cc1"))) ==
        canonical_smiles(parse_smiles("c1ccc(CCc2ccccc2)cc1")));
  CHECK(canonical_smiles(murcko_scaffold(parse_smiles("CC(=O)c1ccccc1"))) == "c1ccccc1");
}

TEST_CASE("murcko scaffold is idempotent") {
  for (const char *s : {"CC(=O)Nc1ccc(O)cc1", "CCC1CCC(=O)CC1", "Cn1cccc1", "CCO",
                        "c1ccc(-c2ccncc2)cc1CCN", "O=C(NCc1ccccc1)C1CCN(C)CC1"}) {
    CAPTURE(s);
    const Molecule once = murcko_scaffold(parse_smiles(s));
    const Molecule twice = murcko_scaffold(once);
    CHECK(canonical_smiles(once) == canonical_smiles(twice));
    if (!once.empty()) CHECK_NOTHROW(validate_valence(once));
  }
}

TEST_CASE("acyclic scaffolds have empty fingerprints") {
  const auto a = morgan_fingerprint(murcko_scaffold(parse_smiles("CCO")), 2, 4096);
  const auto b = morgan_fingerprint(murcko_scaffold(parse_smiles("CCCN")), 2, 4096);
  CHECK(a.popcount() == 0);
  CHECK(tanimoto(a, b) == 1.0);
}
