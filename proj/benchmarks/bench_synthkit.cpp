// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "synthkit/bb_index.hpp"
#include "synthkit/fingerprint.hpp"
#include "synthkit/library.hpp"
#include "synthkit/reconstructor.hpp"
#include "synthkit/route_gen.hpp"
#include "synthkit/smarts.hpp"
#include "synthkit/smiles.hpp"
#include "synthkit/validator.hpp"

using namespace synthkit;

namespace {

struct Fixture {
  BuildingBlockLibrary library = BuildingBlockLibrary::load(std::string(SYNTHKIT_DATA_DIR) + "/building_blocks.smi");
  TemplateSet templates = load_templates(std::string(SYNTHKIT_DATA_DIR) + "/templates/rxn_set_2.tsv");
  ChemicalSpace space{library, templates};
  IndexCatalog catalog = IndexCatalog::build(library, templates);
  std::vector<SynthesisRoute> routes = [this] {
    CorpusOptions opts;
    opts.n = 64;
    opts.seed = 42;
    return generate_routes(space, opts);
  }();
};

const Fixture &fixture() {
  static const Fixture f;
  return f;
}

const std::string &target(std::size_t i) {
  const auto &routes = fixture().routes;
  return routes[i % routes.size()].final_product;
}

void BM_ParseSmiles(benchmark::State &state) {
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(parse_smiles(target(i++)));
}
BENCHMARK(BM_ParseSmiles);

void BM_CanonicalSmiles(benchmark::State &state) {
  std::vector<Molecule> mols;
  for (std::size_t i = 0; i < 64; ++i) mols.push_back(parse_smiles(target(i)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(canonical_smiles(mols[i++ % mols.size()]));
}
BENCHMARK(BM_CanonicalSmiles);

void BM_MorganFingerprint(benchmark::State &state) {
  const Molecule mol = parse_smiles(target(0));
  const int bits = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(morgan_fingerprint(mol, 2, bits));
}
BENCHMARK(BM_MorganFingerprint)->Arg(256)->Arg(4096);

void BM_TemplateMatch(benchmark::State &state) {
  const Fixture &f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    const LibraryEntry &e = f.library[i++ % f.library.size()];
    for (std::size_t t = 0; t < f.templates.size(); ++t)
      benchmark::DoNotOptimize(reactant_matches(f.templates[t], 0, e.molecule));
  }
}
BENCHMARK(BM_TemplateMatch);

void BM_QueryTfidf(benchmark::State &state) {
  const SlotIndex &index = fixture().catalog.indexes().front();
  std::size_t i = 0;
  for (auto _ : state) {
    const std::string &q = index.member_smiles()[i++ % index.member_smiles().size()];
    benchmark::DoNotOptimize(index.query_tfidf(q, 5));
  }
}
BENCHMARK(BM_QueryTfidf);

void BM_QueryFingerprint(benchmark::State &state) {
  const SlotIndex &index = fixture().catalog.indexes().front();
  const Molecule q = parse_smiles(index.member_smiles().front());
  for (auto _ : state) benchmark::DoNotOptimize(index.query_fp(q, 5));
}
BENCHMARK(BM_QueryFingerprint);

void BM_BuildIndexes(benchmark::State &state) {
  const Fixture &f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(IndexCatalog::build(f.library, f.templates));
}
BENCHMARK(BM_BuildIndexes)->Unit(benchmark::kMillisecond);

void BM_EvaluateResponse(benchmark::State &state) {
  const Fixture &f = fixture();
  std::vector<std::string> responses;
  for (const SynthesisRoute &r : f.routes) responses.push_back(route_to_response_json(r));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_response(responses[i++ % responses.size()], f.templates));
}
BENCHMARK(BM_EvaluateResponse)->Unit(benchmark::kMicrosecond);

void BM_Reconstruct(benchmark::State &state) {
  const Fixture &f = fixture();
  std::vector<LlmResponse> responses;
  for (const SynthesisRoute &r : f.routes)
    responses.push_back(std::get<LlmResponse>(parse_response(route_to_response_json(r))));
  ReconstructionConfig cfg;
  cfg.n_syn = static_cast<int>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const std::size_t j = i++ % responses.size();
    benchmark::DoNotOptimize(reconstruct(responses[j], target(j), f.templates, f.catalog, f.library, cfg));
  }
}
BENCHMARK(BM_Reconstruct)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
