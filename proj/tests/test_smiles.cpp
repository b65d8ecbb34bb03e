#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "synthkit/errors.hpp"
#include "synthkit/smiles.hpp"

using namespace synthkit;

namespace {

const std::vector<std::string> kCorpus = {
    "C",
    "CCO",
    "CC(=O)O",
    "c1ccccc1",
    "Cc1ccccc1",
    "c1ccc2ccccc2c1",
    "c1ccc(-c2ccccc2)cc1",
    "c1cc[nH]c1",
    "Cn1cccc1",
    "O=c1cccc[nH]1",
    "c1ccncc1",
    "C[n+]1ccccc1",
    "OB(O)c1ccc(F)cc1",
    "O=S(=O)(Cl)c1ccc(Br)cc1",
    "CC(C)(C)OC(=O)N1CCNCC1",
    "FC(F)(F)c1ccc(C(=O)O)cc1",
    "C1CC2CCC1CC2",
    "C1CC1.C1CCCCC1",
    "[O-][N+](=O)c1ccc(N)cc1",
    "N#Cc1ccc(C=O)cc1",
    "O=C=Nc1ccccc1",
    "c1ccc2[nH]ccc2c1",
    "c1csc(N)n1",
    "C[C@H](N)C(=O)O",
    "F/C=C/F",
    "[2H]C([2H])([2H])O",
    "CC(=O)Nc1ccc(O)cc1",
    "OC(=O)C1CCNCC1",
    "C12C3C4C1C5C2C3C45",
    "c1ccc2c(c1)oc1ccccc12",
    "[NH4+].[Cl-]",
    "CCOC(=O)c1cnc2ccccc2c1",
};

std::vector<int> random_order(std::size_t n, std::mt19937 &rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

}  // namespace

TEST_CASE("methane gets four implicit hydrogens") {
  const Molecule m = parse_smiles("C");
  CHECK(m.num_atoms() == 1);
  CHECK(m.atom(0).hydrogens == 4);
}

TEST_CASE("acetic acid graph") {
  const Molecule m = parse_smiles("CC(=O)O");
  CHECK(m.num_atoms() == 4);
  CHECK(m.num_bonds() == 3);
  int doubles = 0;
  for (const Bond &b : m.bonds()) doubles += b.order == BondOrder::kDouble;
  CHECK(doubles == 1);
  CHECK(m.atom(0).hydrogens == 3);
  CHECK(m.atom(1).hydrogens == 0);
  CHECK(m.atom(3).hydrogens == 1);
}

TEST_CASE("ring closure spellings give isomorphic graphs") {
  CHECK(isomorphic(parse_smiles("C1CC1"), parse_smiles("C(C1)C1")));
  CHECK(isomorphic(parse_smiles("c1ccccc1C"), parse_smiles("Cc1ccccc1")));
  CHECK_FALSE(isomorphic(parse_smiles("C1CC1"), parse_smiles("CCC")));
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse_smiles("C("), SyntaxError);
  CHECK_THROWS_AS(parse_smiles("C)"), SyntaxError);
  CHECK_THROWS_AS(parse_smiles("C1CC"), SyntaxError);
  CHECK_THROWS_AS(parse_smiles("C[NH3+"), SyntaxError);
  CHECK_THROWS_AS(parse_smiles("CQ"), SyntaxError);
  CHECK_THROWS_AS(parse_smiles(""), SyntaxError);
  CHECK_THROWS_AS(parse_smiles("C=="), SyntaxError);
  CHECK_THROWS_AS(parse_smiles("C.."), SyntaxError);
  CHECK_THROWS_AS(parse_smiles("[Xx]"), SyntaxError);
}

TEST_CASE("valence errors") {
  CHECK_THROWS_AS(parse_smiles("C(C)(C)(C)(C)C"), ValenceError);
  CHECK_THROWS_AS(parse_smiles("[CH5]"), ValenceError);
  CHECK_THROWS_AS(parse_smiles("O=O=O"), ValenceError);
  // Five aromatic atoms all needing a pi bond cannot be kekulized.
  CHECK_THROWS_AS(parse_smiles("c1cccn1"), ValenceError);
  CHECK_THROWS_AS(parse_smiles("c1ccccc1c"), ValenceError);
  CHECK_NOTHROW(parse_smiles("c1cc[nH]c1"));
}

TEST_CASE("aromatic bond outside a ring between aromatic atoms is single") {
  const Molecule m = parse_smiles("c1ccccc1c1ccccc1");
  const int b = m.bond_between(5, 6);
  REQUIRE(b >= 0);
  CHECK(m.bond(b).order == BondOrder::kSingle);
  CHECK(canonical_smiles(m) == canonical_smiles(parse_smiles("c1ccc(-c2ccccc2)cc1")));
}

TEST_CASE("bracket atoms") {
  const Molecule m = parse_smiles("C[NH3+]");
  CHECK(m.atom(1).charge == 1);
  CHECK(m.atom(1).hydrogens == 3);
  const Molecule iso = parse_smiles("[13CH4:7]");
  CHECK(iso.atom(0).isotope == 13);
  CHECK(iso.atom(0).atom_map == 7);
  CHECK(parse_smiles("[Na+]").atom(0).element == 11);
  CHECK(parse_smiles("[O-2]").atom(0).charge == -2);
  CHECK(parse_smiles("[Fe+++]").atom(0).charge == 3);
}

TEST_CASE("stereo marks are kept as annotations") {
  const Molecule m = parse_smiles("C[C@@H](N)O");
  CHECK(m.atom(1).chirality == "@@");
  CHECK(canonical_smiles(m) == canonical_smiles(parse_smiles("CC(N)O")));
}

TEST_CASE("canonical smiles of two spellings agree") {
  CHECK(canonical_smiles(parse_smiles("OCC")) == canonical_smiles(parse_smiles("CCO")));
  CHECK(canonical_smiles(parse_smiles("C(=O)(C)O")) == canonical_smiles(parse_smiles("CC(O)=O")));
  CHECK(canonical_smiles(parse_smiles("c1ccccc1O")) == canonical_smiles(parse_smiles("Oc1ccccc1")));
}

TEST_CASE("canonical output is a fixed point and round-trips") {
  for (const std::string &s : kCorpus) {
    CAPTURE(s);
    const Molecule m = parse_smiles(s);
    const std::string c1 = canonical_smiles(m);
    const Molecule back = parse_smiles(c1);
    CHECK(isomorphic(m, back));
    CHECK(canonical_smiles(back) == c1);
  }
}

TEST_CASE("canonical smiles is invariant under atom permutation") {
  std::mt19937 rng(12345);
  for (const std::string &s : kCorpus) {
    CAPTURE(s);
    const Molecule m = parse_smiles(s);
    const std::string expected = canonical_smiles(m);
    for (int trial = 0; trial < 100; ++trial) {
      const Molecule p = permute_atoms(m, random_order(m.num_atoms(), rng));
      REQUIRE(canonical_smiles(p) == expected);
    }
  }
}

TEST_CASE("50 permutations of a 12-atom molecule map to one string") {
  const Molecule m = parse_smiles("CC(C)Cc1ccc(C(C)C)cc1");
  REQUIRE(m.num_atoms() == 13);
  const Molecule twelve = parse_smiles("CC(=O)Nc1ccc(OC)cc1");
  REQUIRE(twelve.num_atoms() == 12);
  std::mt19937 rng(7);
  std::vector<std::string> forms;
  for (int i = 0; i < 50; ++i)
    forms.push_back(canonical_smiles(permute_atoms(twelve, random_order(12, rng))));
  std::sort(forms.begin(), forms.end());
  forms.erase(std::unique(forms.begin(), forms.end()), forms.end());
  CHECK(forms.size() == 1);
}

TEST_CASE("canonical ranks form a permutation") {
  const Molecule m = parse_smiles("CC(=O)Nc1ccc(O)cc1.CCO");
  auto r = canonical_ranks(m);
  std::sort(r.begin(), r.end());
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == static_cast<int>(i));
}

TEST_CASE("try_parse and canonicalize do not throw") {
  CHECK_FALSE(try_parse_smiles("C(").has_value());
  CHECK_FALSE(canonicalize("c1cccn1").has_value());
  CHECK(canonicalize("OCC").value() == canonicalize("CCO").value());
}
