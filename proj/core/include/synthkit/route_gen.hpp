// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "synthkit/library.hpp"
#include "synthkit/reaction.hpp"

namespace synthkit {

/// Maximum number of reaction steps in a generated route.
inline constexpr int kMaxRouteSteps = 5;

struct ReactionStep {
  std::string template_id;
  std::string template_smarts;
  std::vector<std::string> reactants;  // canonical SMILES in slot order
  std::string product;                 // canonical SMILES
};

enum class RouteShape { kLinear, kBranching };

struct SynthesisRoute {
  std::vector<ReactionStep> steps;  // forward order
  std::vector<std::string> building_blocks;
  std::string final_product;
  RouteShape shape = RouteShape::kLinear;
};

/// Reactants that are not the product of any step, unique, in order of
/// first appearance.
std::vector<std::string> route_building_blocks(const std::vector<ReactionStep> &steps);

/// Deterministic random source. Index draws use rejection sampling so they
/// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n); n > 0.
  std::uint64_t uniform(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Seed of the index-th item derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Library and templates with the compatible building blocks of every
/// (template, slot) precomputed.
class ChemicalSpace {
 public:
  ChemicalSpace(const BuildingBlockLibrary &library, const TemplateSet &templates, int jobs = 1);

  const BuildingBlockLibrary &library() const noexcept { return *library_; }
  const TemplateSet &templates() const noexcept { return *templates_; }
  const std::vector<int> &compatible(std::size_t tpl, std::size_t slot) const { return compatible_[tpl][slot]; }
  /// Product over slots of the compatible-set sizes.
  std::uint64_t combinations(std::size_t tpl) const;

 private:
  const BuildingBlockLibrary *library_;
  const TemplateSet *templates_;
  std::vector<std::vector<std::vector<int>>> compatible_;
};

struct RouteOptions {
  int max_steps = kMaxRouteSteps;
  /// Resampling budget for branching routes.
  int branching_attempts = 200;
  /// Optional predicate every step product must satisfy (off by default).
  std::function<bool(const Molecule &)> product_filter;
};

/// Linear route. Throws NoViableStart if no template has every slot filled
/// or no start yields a product.
SynthesisRoute sample_route(const ChemicalSpace &space, std::uint64_t seed, const RouteOptions &opts = {});

/// Two sub-routes joined by a step whose reactants are both intermediates,
/// then extended. Throws NoBranchingFound when the attempt budget runs out.
SynthesisRoute sample_branching_route(const ChemicalSpace &space, std::uint64_t seed, const RouteOptions &opts = {});

struct PromptResponsePair {
  std::string instruction;
  std::string input;
  std::string output;
};

/// Serializes the route retrosynthetically: last step first.
std::string route_to_response_json(const SynthesisRoute &route);
PromptResponsePair route_to_pair(const SynthesisRoute &route, const std::string &instruction);

/// Reads the instruction asset. Throws IoError.
std::string load_instruction(const std::filesystem::path &path);

struct CorpusOptions {
  std::size_t n = 100;
  std::uint64_t seed = 0;
  RouteShape shape = RouteShape::kLinear;
  int jobs = 1;
  /// Skip routes whose final product already appeared earlier in the corpus.
  bool unique_targets = false;
  RouteOptions route;
};

/// n routes, route i drawn from derive_seed(seed, i). Output does not depend
/// on the thread count.
std::vector<SynthesisRoute> generate_routes(const ChemicalSpace &space, const CorpusOptions &opts);

std::string pair_to_jsonl(const PromptResponsePair &pair);
/// Writes one JSON object per line with fields instruction, input, output.
void write_corpus(const std::filesystem::path &path, const std::vector<PromptResponsePair> &pairs);
/// Reads a JSON-lines corpus. Throws IoError.
std::vector<PromptResponsePair> read_corpus(const std::filesystem::path &path);

}  // namespace synthkit
