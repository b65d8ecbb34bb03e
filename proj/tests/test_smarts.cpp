#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "synthkit/errors.hpp"
#include "synthkit/smarts.hpp"
#include "synthkit/smiles.hpp"

using namespace synthkit;

TEST_CASE("mapped bracket atoms") {
  const Pattern p = parse_smarts("[C:1](=O)[OH]");
  CHECK(p.num_atoms() == 3);
  CHECK(p.atom(0).atom_map == 1);
  CHECK(p.atom_with_map(1) == 0);
  CHECK(p.atom_with_map(2) == -1);
  CHECK(p.bonds().size() == 2);
}

TEST_CASE("recursive primary amine") {
  const Pattern p = parse_smarts("[$([NX3;H2])]");
  CHECK(has_substructure(p, parse_smiles("NCC")));
  CHECK_FALSE(has_substructure(p, parse_smiles("N(C)C")));
}

TEST_CASE("unknown and unsupported primitives") {
  CHECK_THROWS_AS(parse_smarts("[Q]"), SyntaxError);
  CHECK_THROWS_AS(parse_smarts("C("), SyntaxError);
  CHECK_THROWS_AS(parse_smarts("[C"), SyntaxError);
  CHECK_THROWS_AS(parse_smarts("C1CC"), SyntaxError);
  CHECK_THROWS_AS(parse_smarts("[C:1][N:1]"), SyntaxError);
  CHECK_THROWS_AS(parse_smarts(""), SyntaxError);
  CHECK_THROWS_AS(parse_smarts("[R2]"), UnsupportedFeature);
  CHECK_THROWS_AS(parse_smarts("[r5]"), UnsupportedFeature);
  CHECK_THROWS_AS(parse_smarts("[v4]"), UnsupportedFeature);
}

TEST_CASE("match counts") {
  CHECK(match_substructure(parse_smarts("C"), parse_smiles("CC")).size() == 2);
  CHECK(match_substructure(parse_smarts("cc"), parse_smiles("c1ccccc1")).size() == 12);
  CHECK(match_substructure(parse_smarts("[OH]"), parse_smiles("CC")).empty());
  CHECK(match_substructure(parse_smarts("C=O"), parse_smiles("CC(=O)O")).size() == 1);
  CHECK(match_substructure(parse_smarts("C~O"), parse_smiles("CC(=O)O")).size() == 2);
}

TEST_CASE("primitives") {
  const Molecule m = parse_smiles("C[NH3+].c1ccncc1.OC(=O)C1CC1");
  CHECK(has_substructure(parse_smarts("[N+;H3]"), m));
  CHECK(has_substructure(parse_smarts("[#7;a]"), m));
  CHECK(has_substructure(parse_smarts("[n;R]"), m));
  CHECK_FALSE(has_substructure(parse_smarts("[N;R]"), m));
  CHECK(has_substructure(parse_smarts("[C;R0](=O)[OH]"), m));
  CHECK(has_substructure(parse_smarts("[CX4;R]@[CX4]"), m));
  CHECK(has_substructure(parse_smarts("[O;D1;!H0]"), m));
  CHECK(has_substructure(parse_smarts("[C,N;+]"), m));
  CHECK_FALSE(has_substructure(parse_smarts("[C;+]"), m));
  CHECK(has_substructure(parse_smarts("[Br,I,c]"), m));
  CHECK(has_substructure(parse_smarts("[+0;c]"), m));
}

TEST_CASE("pinned properties") {
  const Pattern p = parse_smarts("[CH1;$(C([#6])=O);+0:1]");
  CHECK(p.atom(0).query.pinned_element() == 6);
  CHECK(p.atom(0).query.pinned_aromatic() == false);
  CHECK(p.atom(0).query.pinned_hydrogens() == 1);
  CHECK(p.atom(0).query.pinned_charge() == 0);
  const Pattern q = parse_smarts("[C,N]");
  CHECK_FALSE(q.atom(0).query.pinned_element().has_value());
  CHECK(parse_smarts("C=C").bonds()[0].query.pinned_order() == BondOrder::kDouble);
  CHECK_FALSE(parse_smarts("CC").bonds()[0].query.pinned_order().has_value());
}

TEST_CASE("matcher agrees with brute-force enumeration") {
  const std::vector<std::string> patterns = {
      "C", "CC", "C=O", "[#6]~[#8]", "c:c", "cc", "[N;!H0]", "C1CC1", "[C;R]", "*~*~*",
      "[C,N]C", "C(=O)O", "[O;H1]", "[$(C=O)]", "a-a", "[!#6]", "C@C", "[C;!R]-,=[O,N]", "C.C", "N!@C"};
  const std::vector<std::string> mols = {
      "CCO", "CC(=O)O", "c1ccccc1", "C1CC1C", "NCC(N)=O", "c1ccncc1", "OC1CCC1", "CC(C)(C)N",
      "O=C1CCN1", "c1ccc(-c2cc[nH]c2)cc1", "C=CC=O", "CNC.OCC", "C1CC1C1CC1", "NC(=O)c1ccco1"};
  for (const std::string &ps : patterns) {
    const Pattern p = parse_smarts(ps);
    for (const std::string &ms : mols) {
      CAPTURE(ps);
      CAPTURE(ms);
      const Molecule m = parse_smiles(ms);
      std::vector<std::vector<int>> fast;
      for (const Match &x : match_substructure(p, m)) fast.push_back(x.atom_assignment);
      CHECK(fast == testing::brute_force_matches(p, m));
    }
  }
}
