#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "synthkit/errors.hpp"
#include "synthkit/reaction.hpp"
#include "synthkit/smiles.hpp"

using namespace synthkit;

namespace {

const char *kAmide = "[C:1](=[O:2])[OH].[N;!$(N=*):3]>>[C:1](=[O:2])[N:3]";

std::set<std::string> products_of(const ReactionTemplate &t, const std::vector<std::string> &smiles) {
  std::vector<Molecule> mols;
  for (const auto &s : smiles) mols.push_back(parse_smiles(s));
  std::set<std::string> out;
  for (const Product &p : apply_forward(t, mols)) out.insert(p.smiles);
  return out;
}

std::string canon(const std::string &s) { return canonical_smiles(parse_smiles(s)); }

TemplateSet shipped(const char *name) {
  return load_templates(std::string(SYNTHKIT_DATA_DIR) + "/templates/" + name);
}

}  // namespace

TEST_CASE("parse amide coupling") {
  const ReactionTemplate t = parse_reaction(kAmide);
  CHECK(t.num_slots() == 2);
  CHECK(t.product_patterns.size() == 1);
  CHECK(t.smarts_text == kAmide);
}

TEST_CASE("reaction syntax and closure errors") {
  CHECK_THROWS_AS(parse_reaction(">>C"), SyntaxError);
  CHECK_THROWS_AS(parse_reaction("CC"), SyntaxError);
  CHECK_THROWS_AS(parse_reaction("C>>C>>C"), SyntaxError);
  CHECK_THROWS_AS(parse_reaction("[C:1]>>[C:1][N:2]"), MapClosureError);
  CHECK_THROWS_AS(parse_reaction("[C:1].[N:1]>>[C:1]"), MapClosureError);
  CHECK_THROWS_AS(parse_reaction("[C:1]>>[C:1]*"), UnsupportedFeature);
}

TEST_CASE("reactant slot matches") {
  const ReactionTemplate t = parse_reaction(kAmide);
  CHECK_FALSE(reactant_matches(t, 0, parse_smiles("CC(=O)O")).empty());
  CHECK(reactant_matches(t, 0, parse_smiles("C")).empty());
  // A molecule with both an acid and an amine matches each slot on its own.
  const Molecule both = parse_smiles("NCC(=O)O");
  const auto m0 = reactant_matches(t, 0, both);
  const auto m1 = reactant_matches(t, 1, both);
  CHECK(m0.size() == 1);
  CHECK(m1.size() == 1);
  CHECK(m0[0].slot == 0);
  CHECK(m1[0].slot == 1);
}

TEST_CASE("amide coupling forward") {
  const ReactionTemplate t = parse_reaction(kAmide);
  CHECK(products_of(t, {"CC(=O)O", "NCC"}) == std::set<std::string>{canon("CCNC(C)=O")});
  CHECK(products_of(t, {"CCC", "NCC"}).empty());
  CHECK_THROWS_AS(products_of(t, {"CC(=O)O"}), SlotCountMismatch);
}

TEST_CASE("symmetric diamine dedups to one product") {
  const ReactionTemplate t = parse_reaction(kAmide);
  const Molecule acid = parse_smiles("CC(=O)O");
  const Molecule diamine = parse_smiles("NCCN");
  CHECK(reactant_matches(t, 1, diamine).size() == 2);
  CHECK(products_of(t, {"CC(=O)O", "NCCN"}) == std::set<std::string>{canon("CC(=O)NCCN")});
  CHECK(products_of(t, {"CC(=O)O", "NCCCN(C)"}).size() == 2);
}

TEST_CASE("shipped templates load and behave") {
  const TemplateSet s1 = shipped("rxn_set_1.tsv");
  const TemplateSet s2 = shipped("rxn_set_2.tsv");
  CHECK(s1.size() == 6);
  CHECK(s2.size() == 8);
  for (const ReactionTemplate &t : s2) CHECK(t.num_slots() == 2);
  CHECK(s1.find("R01") == 0);
  CHECK(s1.find(" " + s1[2].smarts_text + " ") == 2);
  CHECK(s1.find("nope") == -1);

  auto run = [&](const char *id, std::vector<std::string> r) {
    return products_of(s2[static_cast<std::size_t>(s2.find(id))], r);
  };
  CHECK(run("R01", {"OC(=O)c1ccccc1", "NCc1ccccc1"}) == std::set<std::string>{canon("O=C(NCc1ccccc1)c1ccccc1")});
  CHECK(run("R01", {"OC(=O)c1ccccc1", "CC(=O)N"}).empty());
  CHECK(run("R02", {"Brc1ccccc1", "OB(O)c1ccc(C)cc1"}) == std::set<std::string>{canon("Cc1ccc(-c2ccccc2)cc1")});
  CHECK(run("R03", {"O=S(=O)(Cl)c1ccccc1", "C1CCNCC1"}) == std::set<std::string>{canon("O=S(=O)(N1CCCCC1)c1ccccc1")});
  CHECK(run("R04", {"O=Cc1ccccc1", "NC"}) == std::set<std::string>{canon("CNCc1ccccc1")});
  CHECK(run("R04", {"CC(=O)C", "NC"}).empty());
  CHECK(run("R05", {"CC(=O)O", "OCC"}) == std::set<std::string>{canon("CCOC(C)=O")});
  CHECK(run("R06", {"Ic1ccncc1", "C1COCCN1"}) == std::set<std::string>{canon("C1COCCN1c1ccncc1")});
  CHECK(run("R06", {"Ic1ccncc1", "Nc1ccccc1"}).empty());
  CHECK(run("R07", {"O=C=Nc1ccccc1", "NCC"}) == std::set<std::string>{canon("CCNC(=O)Nc1ccccc1")});
  CHECK(run("R08", {"BrCc1ccccc1", "Oc1ccccc1"}) == std::set<std::string>{canon("c1ccc(COc2ccccc2)cc1")});
}

TEST_CASE("products re-match their templates' reactant slots and round-trip") {
  const TemplateSet s2 = shipped("rxn_set_2.tsv");
  const std::vector<std::string> pool = {
      "OC(=O)c1ccccc1", "CC(=O)O", "NCC", "C1CCNCC1", "Brc1ccccc1", "OB(O)c1ccc(C)cc1",
      "O=S(=O)(Cl)c1ccccc1", "O=Cc1ccccc1", "OCC", "O=C=Nc1ccccc1", "BrCc1ccccc1", "Oc1ccccc1",
      "NCCN", "OC(=O)CCN", "Brc1ccc(B(O)O)cc1"};
  int produced = 0;
  for (const ReactionTemplate &t : s2) {
    for (const auto &a : pool) {
      for (const auto &b : pool) {
        const std::vector<Molecule> r{parse_smiles(a), parse_smiles(b)};
        const auto products = apply_forward(t, r);
        const auto again = apply_forward(t, r);
        REQUIRE(products.size() == again.size());
        for (std::size_t i = 0; i < products.size(); ++i) {
          CAPTURE(t.id);
          CAPTURE(products[i].smiles);
          CHECK(products[i].smiles == again[i].smiles);
          CHECK_FALSE(reactant_matches(t, 0, r[0]).empty());
          CHECK_FALSE(reactant_matches(t, 1, r[1]).empty());
          const auto reparsed = try_parse_smiles(products[i].smiles);
          REQUIRE(reparsed.has_value());
          CHECK(canonical_smiles(*reparsed) == products[i].smiles);
          ++produced;
        }
      }
    }
  }
  CHECK(produced > 20);
}
