// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "synthkit/reaction.hpp"

namespace synthkit {

struct ResponseStep {
  std::string reaction_template;
  std::vector<std::string> reactants;
  std::string product;
};

/// Structured response: reactions in retrosynthetic order plus the
/// building-block list. Chemical validity is not enforced here.
struct LlmResponse {
  std::vector<ResponseStep> reactions;
  std::vector<std::string> building_blocks;
  std::string raw_text;
};

struct ParseFailure {
  std::string reason;
};

using ParsedResponse = std::variant<LlmResponse, ParseFailure>;

/// Strict schema: an object with exactly the keys "reactions" (array of
/// objects with exactly "reaction_template" string, "reactants" non-empty
/// string array, "product" string) and "building_blocks" (string array).
ParsedResponse parse_response(std::string_view text);

/// Per step: template text, whitespace-stripped, equals a known template.
std::vector<bool> check_template_memorization(const LlmResponse &resp, const TemplateSet &templates);

/// building_blocks as a set equals {reactants} minus {products}; strings are
/// compared by canonical SMILES where they parse, raw text otherwise.
bool check_bb_selection(const LlmResponse &resp);

struct SmilesValidity {
  std::size_t valid = 0;
  std::size_t total = 0;
  /// Per string, in order: each step's reactants then product, then the
  /// building blocks.
  std::vector<bool> flags;
  double fraction() const { return total == 0 ? 1.0 : static_cast<double>(valid) / static_cast<double>(total); }
};
SmilesValidity check_valid_smiles(const LlmResponse &resp);

/// Per step and slot: the template is known, the reactant count equals its
/// slot count, and the reactant parses and matches its slot. A step passes
/// when all of its slots pass.
std::vector<std::vector<bool>> check_matched_reactants(const LlmResponse &resp, const TemplateSet &templates);

/// Per step: the canonical product is among apply_forward of the template on
/// the reactants.
std::vector<bool> check_good_products(const LlmResponse &resp, const TemplateSet &templates);

struct Metric {
  std::size_t passed = 0;
  std::size_t total = 0;
  /// 1.0 when the denominator is zero.
  double fraction() const { return total == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(total); }
  Metric &operator+=(const Metric &o) {
    passed += o.passed;
    total += o.total;
    return *this;
  }
  friend bool operator==(const Metric &, const Metric &) = default;
};

/// Six metrics with their denominators: valid_json over responses;
/// template_mem, matched_reactants, good_products over steps of parseable
/// responses; valid_smiles over strings; bb_selection over parseable
/// responses.
struct BenchmarkReport {
  Metric valid_json;
  Metric template_mem;
  Metric bb_selection;
  Metric valid_smiles;
  Metric matched_reactants;
  Metric good_products;

  BenchmarkReport &operator+=(const BenchmarkReport &o);
  friend bool operator==(const BenchmarkReport &, const BenchmarkReport &) = default;

  std::string to_json() const;
  /// Aligned text table, one row per metric.
  std::string to_table() const;
};

/// Metrics of one response.
BenchmarkReport evaluate_response(std::string_view text, const TemplateSet &templates);

/// Aggregated metrics; evaluation runs on up to `jobs` threads and the
/// result does not depend on the thread count.
BenchmarkReport benchmark_corpus(const std::vector<std::string> &responses, const TemplateSet &templates,
                                 int jobs = 1);

/// One line of a response file.
struct ResponseRecord {
  std::string target;    // "target_smiles" or "input"; may be empty
  std::string response;  // "response" or "output"; otherwise the whole line
  std::string error;     // "error" field of inference records, if any
};

/// Reads JSON lines of inference records, prompt-response pairs or raw
/// responses. Throws IoError.
std::vector<ResponseRecord> read_responses(const std::filesystem::path &path);
std::vector<ResponseRecord> parse_response_lines(std::string_view text);

}  // namespace synthkit
