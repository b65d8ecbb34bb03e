#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "faults.hpp"
#include "json.hpp"
#include "synthkit/errors.hpp"
#include "synthkit/route_gen.hpp"
#include "synthkit/validator.hpp"

using namespace synthkit;

namespace {

const char *kAmide =
    "[C;$(C[#6]):1](=[O:2])[OH].[N;+0;!H0;!$(N=*);!$(N#*);!$(N[#6,#16]=[#7,#8,#16]);!$(N[N,O,S]):3]>>"
    "[C:1](=[O:2])[N:3]";
const char *kSuzuki = "[c:1][Br,I].[c:2][B]([OH])[OH]>>[c:1]-[c:2]";
const char *kBiaryl = "[c:1][Br,I].[c:2][Br,I]>>[c:1]-[c:2]";

TemplateSet fixture_templates() {
  return TemplateSet({parse_reaction(kAmide, "amide"), parse_reaction(kSuzuki, "suzuki"),
                      parse_reaction(kBiaryl, "biaryl")});
}

std::string one_step(const std::string &tpl, const std::vector<std::string> &reactants, const std::string &product,
                     const std::vector<std::string> &bbs) {
  nlohmann::ordered_json doc;
  doc["reactions"] = {{{"reaction_template", tpl}, {"reactants", reactants}, {"product", product}}};
  doc["building_blocks"] = bbs;
  return doc.dump();
}

const std::string kAmideResponse = one_step(kAmide, {"CC(=O)O", "NCc1ccccc1"}, "CC(=O)NCc1ccccc1",
                                            {"CC(=O)O", "NCc1ccccc1"});

LlmResponse parsed(const std::string &text) {
  ParsedResponse p = parse_response(text);
  REQUIRE(std::holds_alternative<LlmResponse>(p));
  return std::get<LlmResponse>(std::move(p));
}

struct Shipped {
  BuildingBlockLibrary library = BuildingBlockLibrary::load(std::string(SYNTHKIT_DATA_DIR) + "/building_blocks.smi");
  TemplateSet templates = load_templates(std::string(SYNTHKIT_DATA_DIR) + "/templates/rxn_set_2.tsv");
  ChemicalSpace space{library, templates, 1};
};

const Shipped &shipped() {
  static const Shipped s;
  return s;
}

std::vector<std::string> shipped_responses(std::size_t n, std::uint64_t seed) {
  std::vector<std::string> out;
  CorpusOptions opts;
  opts.n = n / 2;
  opts.seed = seed;
  for (const auto &r : generate_routes(shipped().space, opts)) out.push_back(route_to_response_json(r));
  opts.shape = RouteShape::kBranching;
  opts.n = n - n / 2;
  for (const auto &r : generate_routes(shipped().space, opts)) out.push_back(route_to_response_json(r));
  return out;
}

void check_perfect(const BenchmarkReport &r) {
  for (const Metric *m : {&r.valid_json, &r.template_mem, &r.bb_selection, &r.valid_smiles, &r.matched_reactants,
                          &r.good_products})
    CHECK(m->passed == m->total);
}

}  // namespace

TEST_CASE("parse_response schema") {
  const LlmResponse resp = parsed(kAmideResponse);
  CHECK(resp.reactions.size() == 1);
  CHECK(resp.reactions[0].reactants.size() == 2);
  CHECK(resp.raw_text == kAmideResponse);

  auto fails = [](const std::string &text) { return std::holds_alternative<ParseFailure>(parse_response(text)); };
  std::string misspelled = kAmideResponse;
  misspelled.replace(misspelled.find("reactions"), 9, "reactoins");
  CHECK(fails(misspelled));
  CHECK(fails(R"({"reactions":[],"building_blocks":"CCO"})"));
  CHECK(fails(R"({"reactions":[],"building_blocks":[1]})"));
  CHECK(fails(R"({"reactions":{},"building_blocks":[]})"));
  CHECK(fails(R"({"reactions":[],"building_blocks":[],"extra":1})"));
  CHECK(fails(R"({"reactions":[{"reaction_template":"x","reactants":[],"product":"C"}],"building_blocks":[]})"));
  CHECK(fails(R"({"reactions":[{"reaction_template":"x","reactants":["C"]}],"building_blocks":[]})"));
  CHECK(fails(R"({"reactions":[{"reaction_template":1,"reactants":["C"],"product":"C"}],"building_blocks":[]})"));
  CHECK(fails(R"([1,2])"));
  CHECK(fails(kAmideResponse.substr(0, 40)));
  CHECK(fails(""));
  CHECK_FALSE(fails(R"({"reactions":[],"building_blocks":[]})"));
  const auto failure = std::get<ParseFailure>(parse_response(R"({"building_blocks":[]})"));
  CHECK(failure.reason.find("reactions") != std::string::npos);
}

TEST_CASE("template memorization") {
  const TemplateSet templates = fixture_templates();
  CHECK(check_template_memorization(parsed(kAmideResponse), templates) == std::vector<bool>{true});
  std::string spaced = std::string(kAmide);
  spaced.insert(spaced.find(">>"), "  ");
  CHECK(check_template_memorization(parsed(one_step(spaced, {"C"}, "C", {})), templates) == std::vector<bool>{true});
  std::string mutated = kAmide;
  mutated[mutated.find(":1")] = ';';
  CHECK(check_template_memorization(parsed(one_step(mutated, {"C"}, "C", {})), templates) ==
        std::vector<bool>{false});
  CHECK(check_template_memorization(parsed(one_step("amide", {"C"}, "C", {})), templates) ==
        std::vector<bool>{false});
  const BenchmarkReport empty = evaluate_response(R"({"reactions":[],"building_blocks":[]})", templates);
  CHECK(empty.template_mem.total == 0);
  CHECK(empty.template_mem.fraction() == 1.0);
}

TEST_CASE("building block selection") {
  CHECK(check_bb_selection(parsed(kAmideResponse)));
  CHECK_FALSE(check_bb_selection(parsed(one_step(kAmide, {"CC(=O)O", "NCc1ccccc1"}, "P", {"CC(=O)O"}))));
  CHECK(check_bb_selection(parsed(one_step(kAmide, {"CC(=O)O", "NCc1ccccc1"}, "P", {"OC(C)=O", "c1ccccc1CN"}))));
  const std::string two_step = R"({"reactions":[
    {"reaction_template":"t","reactants":["A1","CCN"],"product":"T"},
    {"reaction_template":"t","reactants":["CC(=O)O","NCCN"],"product":"A1"}],
    "building_blocks":["CCN","CC(=O)O","NCCN"]})";
  CHECK(check_bb_selection(parsed(two_step)));
  std::string with_intermediate = two_step;
  with_intermediate.replace(with_intermediate.find("\"CCN\",\"CC"), 5, "\"A1\",\"CCN\"");
  CHECK_FALSE(check_bb_selection(parsed(with_intermediate)));
}

TEST_CASE("valid SMILES fraction") {
  const SmilesValidity all = check_valid_smiles(parsed(kAmideResponse));
  CHECK(all.total == 5);
  CHECK(all.fraction() == 1.0);
  const SmilesValidity one_bad = check_valid_smiles(parsed(one_step("t", {"CCO", "C1CC"}, "CCN", {"CCO"})));
  CHECK(one_bad.total == 4);
  CHECK(one_bad.valid == 3);
  CHECK(one_bad.fraction() == 0.75);
  CHECK(one_bad.flags == std::vector<bool>{true, false, true, true});
  const SmilesValidity dup = check_valid_smiles(parsed(one_step("t", {"C(", "C("}, "C(", {"C("})));
  CHECK(dup.total == 4);
  CHECK(dup.valid == 0);
}

TEST_CASE("matched reactants") {
  const TemplateSet templates = fixture_templates();
  CHECK(check_matched_reactants(parsed(kAmideResponse), templates) == std::vector<std::vector<bool>>{{true, true}});
  const auto swapped =
      check_matched_reactants(parsed(one_step(kAmide, {"NCc1ccccc1", "CC(=O)O"}, "CC(=O)NCc1ccccc1", {})), templates);
  CHECK(swapped == std::vector<std::vector<bool>>{{false, false}});
  CHECK(check_matched_reactants(parsed(one_step(kBiaryl, {"Brc1ccccc1", "Ic1ccncc1"}, "c1ccc(-c2ccncc2)cc1", {})),
                                templates) == std::vector<std::vector<bool>>{{true, true}});
  CHECK(check_matched_reactants(parsed(one_step(kBiaryl, {"Ic1ccncc1", "Brc1ccccc1"}, "c1ccc(-c2ccncc2)cc1", {})),
                                templates) == std::vector<std::vector<bool>>{{true, true}});
  CHECK(check_matched_reactants(parsed(one_step(kAmide, {"CC(=O)O", "N(("}, "C", {})), templates) ==
        std::vector<std::vector<bool>>{{true, false}});
  CHECK(check_matched_reactants(parsed(one_step("unknown", {"CC(=O)O", "NC"}, "C", {})), templates) ==
        std::vector<std::vector<bool>>{{false, false}});
  CHECK(check_matched_reactants(parsed(one_step(kAmide, {"CC(=O)O"}, "C", {})), templates) ==
        std::vector<std::vector<bool>>{{false}});
}

TEST_CASE("good products") {
  const TemplateSet templates = fixture_templates();
  CHECK(check_good_products(parsed(kAmideResponse), templates) == std::vector<bool>{true});
  CHECK(check_good_products(parsed(one_step(kAmide, {"CC(=O)O", "NCc1ccccc1"}, "c1ccccc1CNC(C)=O", {})),
                            templates) == std::vector<bool>{true});
  CHECK(check_good_products(parsed(one_step(kAmide, {"CC(=O)O", "NCc1ccccc1"}, "CCCCCC", {})), templates) ==
        std::vector<bool>{false});
  // Either amine of a diamine may be acylated; both products are accepted.
  CHECK(check_good_products(parsed(one_step(kAmide, {"CC(=O)O", "NCCCNC"}, "CNCCCNC(C)=O", {})), templates) ==
        std::vector<bool>{true});
  CHECK(check_good_products(parsed(one_step(kAmide, {"CC(=O)O", "NCCCNC"}, "CN(CCCN)C(C)=O", {})), templates) ==
        std::vector<bool>{true});
  CHECK(check_good_products(parsed(one_step(kAmide, {"CC(=O)O", "NCc1ccccc1"}, "CC(=O)NCc1ccccc1(", {})),
                            templates) == std::vector<bool>{false});
}

TEST_CASE("generated corpora score perfectly") {
  const auto responses = shipped_responses(100, 31);
  const BenchmarkReport report = benchmark_corpus(responses, shipped().templates, 2);
  check_perfect(report);
  CHECK(report.valid_json.total == 100);
  CHECK(report.bb_selection.total == 100);
  CHECK(report.template_mem.total == report.good_products.total);
  CHECK(report.template_mem.total > 100);
  CHECK(benchmark_corpus(responses, shipped().templates, 1) == report);
}

TEST_CASE("corrupted JSON and a mutated product shift the expected metrics") {
  const TemplateSet &templates = shipped().templates;
  auto responses = shipped_responses(100, 5);
  for (std::size_t i = 0; i < 100; i += 10) responses[i] = responses[i].substr(0, responses[i].size() - 3);
  const BenchmarkReport broken = benchmark_corpus(responses, templates);
  CHECK(broken.valid_json.passed == 90);
  CHECK(broken.valid_json.total == 100);
  CHECK(broken.valid_json.fraction() == doctest::Approx(0.9));

  std::vector<std::string> ten;
  CorpusOptions opts;
  opts.n = 400;
  opts.seed = 17;
  for (const auto &r : generate_routes(shipped().space, opts))
    if (r.steps.size() == 2 && ten.size() < 10) ten.push_back(route_to_response_json(r));
  REQUIRE(ten.size() == 10);
  ten[3] = *testing::inject_fault(testing::Fault::kMutateProduct, ten[3], templates);
  const BenchmarkReport one = benchmark_corpus(ten, templates);
  CHECK(one.good_products.passed == 19);
  CHECK(one.good_products.total == 20);
  CHECK(one.good_products.fraction() == 0.95);
}

TEST_CASE("each fault operator shifts exactly its metrics") {
  const TemplateSet &templates = shipped().templates;
  const auto responses = shipped_responses(60, 123);
  for (const auto &[fault, name] : testing::all_faults()) {
    CAPTURE(name);
    int applied = 0;
    for (const std::string &clean : responses) {
      const auto corrupted = testing::inject_fault(fault, clean, templates);
      if (!corrupted) continue;
      ++applied;
      const BenchmarkReport before = evaluate_response(clean, templates);
      check_perfect(before);
      CHECK(evaluate_response(*corrupted, templates) == testing::predicted_shift(fault, before));
    }
    CHECK(applied >= 30);
  }
}

TEST_CASE("adding a perfect response never lowers a fraction") {
  const TemplateSet &templates = shipped().templates;
  auto responses = shipped_responses(20, 8);
  responses[2] = *testing::inject_fault(testing::Fault::kSwapReactants, responses[2], templates);
  responses[5] = *testing::inject_fault(testing::Fault::kDropBb, responses[5], templates);
  responses[7] = "{";
  BenchmarkReport report = benchmark_corpus(responses, templates);
  for (const std::string &extra : shipped_responses(6, 99)) {
    BenchmarkReport next = report;
    next += evaluate_response(extra, templates);
    for (auto field : {&BenchmarkReport::valid_json, &BenchmarkReport::template_mem, &BenchmarkReport::bb_selection,
                       &BenchmarkReport::valid_smiles, &BenchmarkReport::matched_reactants,
                       &BenchmarkReport::good_products})
      CHECK((next.*field).fraction() >= (report.*field).fraction());
    report = next;
  }
}

TEST_CASE("report rendering") {
  BenchmarkReport r;
  r.valid_json = {9, 10};
  r.good_products = {19, 20};
  const auto doc = nlohmann::json::parse(r.to_json());
  CHECK(doc["valid_json"]["passed"] == 9);
  CHECK(doc["valid_json"]["total"] == 10);
  CHECK(doc["good_products"]["fraction"] == 0.95);
  CHECK(doc["template_mem"]["fraction"] == 1.0);
  const std::string table = r.to_table();
  for (const char *label :
       {"Valid JSON", "Template Mem.", "BB Selection", "Valid SMILES", "Matched Reactants", "Good Products"})
    CHECK(table.find(label) != std::string::npos);
  CHECK(table.find("90.0%") != std::string::npos);
  CHECK(table.find("95.0%") != std::string::npos);
}

TEST_CASE("response files") {
  const auto records = parse_response_lines(
      "{\"target_smiles\":\"CCO\",\"response\":\"{}\",\"error\":\"\"}\n"
      "{\"instruction\":\"i\",\"input\":\"CCN\",\"output\":\"x\"}\r\n"
      "\n"
      "{\"reactions\":[],\"building_blocks\":[]}\n"
      "not json at all\n");
  REQUIRE(records.size() == 4);
  CHECK(records[0].target == "CCO");
  CHECK(records[0].response == "{}");
  CHECK(records[1].target == "CCN");
  CHECK(records[1].response == "x");
  CHECK(records[2].target.empty());
  CHECK(records[2].response == "{\"reactions\":[],\"building_blocks\":[]}");
  CHECK(records[3].response == "not json at all");
  CHECK_THROWS_AS(read_responses("/nonexistent/responses.jsonl"), IoError);
}
