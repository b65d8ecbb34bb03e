// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthkit/bb_index.hpp"
#include "synthkit/fingerprint.hpp"
#include "synthkit/library.hpp"
#include "synthkit/route_gen.hpp"
#include "synthkit/validator.hpp"

namespace synthkit {

/// n_syn value that disables the beam cap.
inline constexpr int kUnboundedBeam = std::numeric_limits<int>::max();

struct ReconstructionConfig {
  int k = 5;       // neighbors per retriever
  int n_syn = 25;  // partial routes kept per step
  int analog_fp_bits = kAnalogFpBits;
  int analog_fp_radius = kMorganRadius;
};

/// Throws ConfigError unless k >= 1 and n_syn >= 1.
void validate_config(const ReconstructionConfig &cfg);

/// Cosine similarity of token-bigram count vectors; 1.0 for identical
/// strings. Works on text that is not valid SMILES.
double smiles_string_similarity(std::string_view a, std::string_view b);

struct CandidateReactant {
  std::string smiles;   // canonical
  Molecule molecule;
  int library_index = -1;
  bool exact = false;   // the predicted building block itself, from the library
  bool novel = false;   // the predicted building block, absent from the library
};

/// Candidates for one building-block slot: the exact library match first,
/// then fingerprint and tf-idf neighbors, then the predicted molecule itself
/// when it matches the slot but is not in the library.
std::vector<CandidateReactant> candidate_reactants(std::string_view predicted, const ReactionTemplate &tpl,
                                                   const SlotIndex &index, const BuildingBlockLibrary &library,
                                                   int k);

struct ExecutedRoute {
  std::vector<ReactionStep> steps;  // forward order
  std::string final_product;
  bool uses_only_library_bbs = true;
  std::vector<std::string> novel_bbs;
  double similarity_to_target = 0.0;
  double scaffold_similarity = 0.0;
};

struct ReconstructionResult {
  std::string target;  // canonical
  std::vector<ExecutedRoute> routes;
  bool reconstructed = false;
  std::optional<std::size_t> best_analog;  // index into routes
  std::vector<std::string> diagnostics;
};

/// Executes the response's steps forward against the library, tracking at
/// most n_syn partial routes. All beams dying yields an empty route list.
/// Throws TargetParseError when the target does not parse.
ReconstructionResult reconstruct(const LlmResponse &resp, std::string_view target, const TemplateSet &templates,
                                 const IndexCatalog &catalog, const BuildingBlockLibrary &library,
                                 const ReconstructionConfig &cfg = {});

/// Fills the target, similarities, reconstructed flag and best analog.
/// Throws TargetParseError.
void score_result(ReconstructionResult &result, std::string_view target, const ReconstructionConfig &cfg = {});

/// Whether replaying every step forward reproduces the recorded products.
bool replay_route(const ExecutedRoute &route, const TemplateSet &templates);

/// Responses collected for one target across sampling settings.
struct TargetResponses {
  std::string target;
  std::vector<std::string> responses;
};

struct TargetOutcome {
  std::string target;  // canonical where it parses
  std::size_t responses = 0;
  std::size_t parse_failures = 0;
  bool reconstructed = false;
  bool reconstructed_library = false;  // by a route using only library blocks
  bool reconstructed_novel = false;    // by a route using a novel block
  double best_similarity = 0.0;
  double best_scaffold_similarity = 0.0;
  /// Distinct routes from all responses, best similarity first.
  std::vector<ExecutedRoute> routes;
  std::vector<std::string> diagnostics;
};

struct ReconstructionSummary {
  std::size_t targets = 0;
  std::size_t targets_with_routes = 0;
  std::size_t reconstructed_library = 0;
  std::size_t reconstructed_novel = 0;
  std::size_t reconstructed_total = 0;
  /// Mean best similarity over targets with at least one route.
  double mean_similarity = 0.0;
  double mean_scaffold_similarity = 0.0;

  std::string to_json() const;
  std::string to_table() const;
};

struct BatchResult {
  std::vector<TargetOutcome> outcomes;  // input order
  ReconstructionSummary summary;
};

BatchResult batch_reconstruct(const std::vector<TargetResponses> &targets, const TemplateSet &templates,
                              const IndexCatalog &catalog, const BuildingBlockLibrary &library,
                              const ReconstructionConfig &cfg = {}, int jobs = 1);

/// Groups response records by target, keeping first-seen target order.
std::vector<TargetResponses> group_by_target(const std::vector<ResponseRecord> &records);

std::string outcome_to_json(const TargetOutcome &outcome);

}  // namespace synthkit
