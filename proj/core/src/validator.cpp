// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/validator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "synthkit/errors.hpp"
#include "synthkit/parallel.hpp"
#include "synthkit/smiles.hpp"

namespace synthkit {

namespace {

using nlohmann::json;

std::optional<std::string> string_array(const json &value, std::vector<std::string> &out) {
  if (!value.is_array()) return "is not an array";
  for (const json &item : value) {
    if (!item.is_string()) return "has a non-string element";
    out.push_back(item.get<std::string>());
  }
  return std::nullopt;
}

std::optional<std::string> parse_step(const json &value, ResponseStep &step) {
  if (!value.is_object()) return "is not an object";
  for (const auto &[key, _] : value.items())
    if (key != "reaction_template" && key != "reactants" && key != "product") return "has unknown key '" + key + "'";
  const auto tpl = value.find("reaction_template");
  if (tpl == value.end()) return "lacks reaction_template";
  if (!tpl->is_string()) return "reaction_template is not a string";
  step.reaction_template = tpl->get<std::string>();
  const auto reactants = value.find("reactants");
  if (reactants == value.end()) return "lacks reactants";
  if (auto err = string_array(*reactants, step.reactants)) return "reactants " + *err;
  if (step.reactants.empty()) return "reactants is empty";
  const auto product = value.find("product");
  if (product == value.end()) return "lacks product";
  if (!product->is_string()) return "product is not a string";
  step.product = product->get<std::string>();
  return std::nullopt;
}

/// Index of the template whose normalized text equals the step's, or -1.
int memorized_template(const ResponseStep &step, const TemplateSet &templates) {
  const std::string text = normalize_smarts(step.reaction_template);
  for (std::size_t i = 0; i < templates.size(); ++i)
    if (normalize_smarts(templates[i].smarts_text) == text) return static_cast<int>(i);
  return -1;
}

std::string comparison_key(const std::string &smiles) {
  if (auto canonical = canonicalize(smiles)) return *canonical;
  return smiles;
}

std::string percent(const Metric &m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * m.fraction());
  return buf;
}

}  // namespace

ParsedResponse parse_response(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) return ParseFailure{"not valid JSON"};
  if (!doc.is_object()) return ParseFailure{"top level is not an object"};
  for (const auto &[key, _] : doc.items())
    if (key != "reactions" && key != "building_blocks") return ParseFailure{"unknown top-level key '" + key + "'"};
  const auto reactions = doc.find("reactions");
  if (reactions == doc.end()) return ParseFailure{"missing key 'reactions'"};
  if (!reactions->is_array()) return ParseFailure{"reactions is not an array"};
  const auto bbs = doc.find("building_blocks");
  if (bbs == doc.end()) return ParseFailure{"missing key 'building_blocks'"};

  LlmResponse resp;
  resp.raw_text = std::string(text);
  for (std::size_t i = 0; i < reactions->size(); ++i) {
    ResponseStep step;
    if (auto err = parse_step((*reactions)[i], step)) return ParseFailure{"reactions[" + std::to_string(i) + "] " + *err};
    resp.reactions.push_back(std::move(step));
  }
  if (auto err = string_array(*bbs, resp.building_blocks)) return ParseFailure{"building_blocks " + *err};
  return resp;
}

std::vector<bool> check_template_memorization(const LlmResponse &resp, const TemplateSet &templates) {
  std::vector<bool> out;
  out.reserve(resp.reactions.size());
  for (const ResponseStep &step : resp.reactions) out.push_back(memorized_template(step, templates) >= 0);
  return out;
}

bool check_bb_selection(const LlmResponse &resp) {
  std::set<std::string> products;
  for (const ResponseStep &step : resp.reactions) products.insert(comparison_key(step.product));
  std::set<std::string> expected;
  for (const ResponseStep &step : resp.reactions)
    for (const std::string &r : step.reactants) {
      std::string key = comparison_key(r);
      if (!products.count(key)) expected.insert(std::move(key));
    }
  std::set<std::string> listed;
  for (const std::string &bb : resp.building_blocks) listed.insert(comparison_key(bb));
  return listed == expected;
}

SmilesValidity check_valid_smiles(const LlmResponse &resp) {
  SmilesValidity out;
  auto visit = [&](const std::string &s) {
    const bool ok = try_parse_smiles(s).has_value();
    out.flags.push_back(ok);
    out.valid += ok;
    ++out.total;
  };
  for (const ResponseStep &step : resp.reactions) {
    for (const std::string &r : step.reactants) visit(r);
    visit(step.product);
  }
  for (const std::string &bb : resp.building_blocks) visit(bb);
  return out;
}

std::vector<std::vector<bool>> check_matched_reactants(const LlmResponse &resp, const TemplateSet &templates) {
  std::vector<std::vector<bool>> out;
  for (const ResponseStep &step : resp.reactions) {
    std::vector<bool> slots(step.reactants.size(), false);
    const int t = memorized_template(step, templates);
    if (t >= 0 && templates[static_cast<std::size_t>(t)].num_slots() == step.reactants.size()) {
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const auto mol = try_parse_smiles(step.reactants[s]);
        slots[s] = mol && !reactant_matches(templates[static_cast<std::size_t>(t)], s, *mol).empty();
      }
    }
    out.push_back(std::move(slots));
  }
  return out;
}

std::vector<bool> check_good_products(const LlmResponse &resp, const TemplateSet &templates) {
  std::vector<bool> out;
  for (const ResponseStep &step : resp.reactions) {
    bool ok = false;
    const int t = memorized_template(step, templates);
    const auto predicted = canonicalize(step.product);
    if (t >= 0 && predicted && templates[static_cast<std::size_t>(t)].num_slots() == step.reactants.size()) {
      std::vector<Molecule> mols;
      for (const std::string &r : step.reactants) {
        auto mol = try_parse_smiles(r);
        if (!mol) break;
        mols.push_back(std::move(*mol));
      }
      if (mols.size() == step.reactants.size()) {
        for (const Product &p : apply_forward(templates[static_cast<std::size_t>(t)], mols))
          if (p.smiles == *predicted) ok = true;
      }
    }
    out.push_back(ok);
  }
  return out;
}

BenchmarkReport &BenchmarkReport::operator+=(const BenchmarkReport &o) {
  valid_json += o.valid_json;
  template_mem += o.template_mem;
  bb_selection += o.bb_selection;
  valid_smiles += o.valid_smiles;
  matched_reactants += o.matched_reactants;
  good_products += o.good_products;
  return *this;
}

std::string BenchmarkReport::to_json() const {
  nlohmann::ordered_json doc;
  auto put = [&](const char *name, const Metric &m) {
    doc[name] = {{"passed", m.passed}, {"total", m.total}, {"fraction", m.fraction()}};
  };
  put("valid_json", valid_json);
  put("template_mem", template_mem);
  put("bb_selection", bb_selection);
  put("valid_smiles", valid_smiles);
  put("matched_reactants", matched_reactants);
  put("good_products", good_products);
  return doc.dump(2);
}

std::string BenchmarkReport::to_table() const {
  const std::pair<const char *, const Metric *> rows[] = {
      {"Valid JSON", &valid_json},       {"Template Mem.", &template_mem},
      {"BB Selection", &bb_selection},   {"Valid SMILES", &valid_smiles},
      {"Matched Reactants", &matched_reactants}, {"Good Products", &good_products},
  };
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-18s %8s %10s %10s\n", "Metric", "Value", "Passed", "Total");
  out << line;
  for (const auto &[label, m] : rows) {
    std::snprintf(line, sizeof line, "%-18s %8s %10zu %10zu\n", label, percent(*m).c_str(), m->passed, m->total);
    out << line;
  }
  return out.str();
}

BenchmarkReport evaluate_response(std::string_view text, const TemplateSet &templates) {
  BenchmarkReport r;
  r.valid_json.total = 1;
  const ParsedResponse parsed = parse_response(text);
  const auto *resp = std::get_if<LlmResponse>(&parsed);
  if (!resp) return r;
  r.valid_json.passed = 1;

  const std::size_t steps = resp->reactions.size();
  for (const bool ok : check_template_memorization(*resp, templates)) r.template_mem.passed += ok;
  r.template_mem.total = steps;
  r.bb_selection = {check_bb_selection(*resp) ? 1u : 0u, 1};
  const SmilesValidity smiles = check_valid_smiles(*resp);
  r.valid_smiles = {smiles.valid, smiles.total};
  for (const auto &slots : check_matched_reactants(*resp, templates))
    r.matched_reactants.passed += !slots.empty() && std::all_of(slots.begin(), slots.end(), [](bool b) { return b; });
  r.matched_reactants.total = steps;
  for (const bool ok : check_good_products(*resp, templates)) r.good_products.passed += ok;
  r.good_products.total = steps;
  return r;
}

BenchmarkReport benchmark_corpus(const std::vector<std::string> &responses, const TemplateSet &templates, int jobs) {
  std::vector<BenchmarkReport> each(responses.size());
  parallel_for(responses.size(), jobs, [&](std::size_t i) { each[i] = evaluate_response(responses[i], templates); });
  BenchmarkReport total;
  for (const BenchmarkReport &r : each) total += r;
  return total;
}

std::vector<ResponseRecord> parse_response_lines(std::string_view text) {
  std::vector<ResponseRecord> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    ResponseRecord rec;
    rec.response = std::string(line);
    const json doc = json::parse(line.begin(), line.end(), nullptr, false);
    auto field = [&](const char *key) -> const json * {
      if (!doc.is_object()) return nullptr;
      const auto it = doc.find(key);
      return it != doc.end() && it->is_string() ? &*it : nullptr;
    };
    if (const json *r = field("response")) rec.response = r->get<std::string>();
    else if (const json *o = field("output")) rec.response = o->get<std::string>();
    if (const json *t = field("target_smiles")) rec.target = t->get<std::string>();
    else if (const json *i = field("input")) rec.target = i->get<std::string>();
    if (const json *e = field("error")) rec.error = e->get<std::string>();
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ResponseRecord> read_responses(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open response file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_response_lines(buf.str());
}

}  // namespace synthkit
