// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/reconstructor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "synthkit/errors.hpp"
#include "synthkit/parallel.hpp"
#include "synthkit/smiles.hpp"
#include "synthkit/tokenizer.hpp"

namespace synthkit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string comparison_key(std::string_view smiles) {
  if (auto canonical = canonicalize(smiles)) return *canonical;
  return std::string(smiles);
}

/// One response step resolved against the templates, in forward order.
struct PlannedStep {
  std::size_t template_index = 0;
  const ResponseStep *predicted = nullptr;
  /// Per slot: forward index of the step whose product feeds it, or -1.
  std::vector<int> bound_to;
};

struct Partial {
  std::vector<ReactionStep> steps;
  std::vector<Molecule> products;
  std::vector<int> position;  // forward step index -> position in steps, or -1
  std::vector<std::string> novel;
  double score = 0.0;
};

struct Expansion {
  std::size_t beam = 0;
  std::vector<std::size_t> ranks;
  std::size_t rank_sum = 0;
};

struct Outcome {
  std::size_t beam;
  std::vector<std::size_t> ranks;
  const Product *product;
  double score;
  bool exact;  // canonical product equals the predicted one
};

std::size_t saturating_cap(int n_syn, int k) {
  if (n_syn == kUnboundedBeam) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(n_syn) * (2 * static_cast<std::size_t>(k) + 2);
}

std::string route_signature(const ExecutedRoute &route) {
  std::string sig;
  for (const ReactionStep &s : route.steps) {
    sig += s.template_id;
    sig += '|';
    for (const std::string &r : s.reactants) sig += r + '.';
    sig += '>' + s.product + ';';
  }
  return sig;
}

ordered_json route_to_json(const ExecutedRoute &route) {
  ordered_json steps = ordered_json::array();
  for (const ReactionStep &s : route.steps)
    steps.push_back({{"template_id", s.template_id},
                     {"reaction_template", s.template_smarts},
                     {"reactants", s.reactants},
                     {"product", s.product}});
  return {{"final_product", route.final_product},
          {"uses_only_library_bbs", route.uses_only_library_bbs},
          {"novel_bbs", route.novel_bbs},
          {"similarity", route.similarity_to_target},
          {"scaffold_similarity", route.scaffold_similarity},
          {"steps", std::move(steps)}};
}

}  // namespace

void validate_config(const ReconstructionConfig &cfg) {
  if (cfg.k < 1) throw ConfigError("k must be at least 1");
  if (cfg.n_syn < 1) throw ConfigError("n_syn must be at least 1");
  if (cfg.analog_fp_bits < 1 || cfg.analog_fp_radius < 0) throw ConfigError("invalid analog fingerprint settings");
}

double smiles_string_similarity(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  auto counts = [](std::string_view s) {
    std::map<std::string, double> out;
    for (std::string &g : token_ngrams(tokenize_smiles(s), 2)) out[std::move(g)] += 1.0;
    return out;
  };
  const auto ca = counts(a);
  const auto cb = counts(b);
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto &[g, x] : ca) {
    na += x * x;
    if (auto it = cb.find(g); it != cb.end()) dot += x * it->second;
  }
  for (const auto &[g, y] : cb) nb += y * y;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::min(1.0, dot / (std::sqrt(na) * std::sqrt(nb)));
}

std::vector<CandidateReactant> candidate_reactants(std::string_view predicted, const ReactionTemplate &tpl,
                                                   const SlotIndex &index, const BuildingBlockLibrary &library,
                                                   int k) {
  std::vector<CandidateReactant> out;
  std::set<int> taken;
  const std::optional<Molecule> mol = try_parse_smiles(predicted);
  const std::vector<int> &members = index.members();
  auto is_member = [&](int doc) { return std::binary_search(members.begin(), members.end(), doc); };
  auto add_library = [&](int doc, bool exact) {
    if (!taken.insert(doc).second) return;
    const LibraryEntry &e = library[static_cast<std::size_t>(doc)];
    out.push_back({e.canonical, e.molecule, doc, exact, false});
  };

  std::optional<std::string> canonical;
  if (mol) canonical = canonical_smiles(*mol);
  if (canonical) {
    const int doc = library.find(*canonical);
    if (doc >= 0 && is_member(doc)) add_library(doc, true);
  }
  for (const int doc : index.combined_query(predicted, static_cast<std::size_t>(k))) add_library(doc, false);
  if (canonical && library.find(*canonical) < 0 && !reactant_matches(tpl, index.slot(), *mol).empty())
    out.push_back({*canonical, *mol, -1, false, true});
  return out;
}

ReconstructionResult reconstruct(const LlmResponse &resp, std::string_view target, const TemplateSet &templates,
                                 const IndexCatalog &catalog, const BuildingBlockLibrary &library,
                                 const ReconstructionConfig &cfg) {
  validate_config(cfg);
  ReconstructionResult result;
  const std::size_t n = resp.reactions.size();

  // Resolve templates and intermediate bindings in forward order.
  std::vector<std::optional<PlannedStep>> plan(n);
  std::vector<std::string> product_keys(n);
  for (std::size_t f = 0; f < n; ++f) {
    const ResponseStep &step = resp.reactions[n - 1 - f];
    product_keys[f] = comparison_key(step.product);
    const int t = templates.find(step.reaction_template);
    if (t < 0) {
      result.diagnostics.push_back("step " + std::to_string(f + 1) + ": unknown template, skipped");
      continue;
    }
    const ReactionTemplate &tpl = templates[static_cast<std::size_t>(t)];
    if (tpl.num_slots() != step.reactants.size()) {
      result.diagnostics.push_back("step " + std::to_string(f + 1) + ": reactant count differs from template, skipped");
      continue;
    }
    PlannedStep p{static_cast<std::size_t>(t), &step, std::vector<int>(step.reactants.size(), -1)};
    for (std::size_t s = 0; s < step.reactants.size(); ++s) {
      const std::string key = comparison_key(step.reactants[s]);
      for (std::size_t j = f; j-- > 0;) {
        if (plan[j] && product_keys[j] == key) {
          p.bound_to[s] = static_cast<int>(j);
          break;
        }
      }
    }
    plan[f] = std::move(p);
  }

  std::vector<Partial> beam(1);
  beam[0].position.assign(n, -1);
  bool executed_any = false;
  std::map<std::string, std::vector<Product>> forward_cache;
  const std::size_t cap = saturating_cap(cfg.n_syn, cfg.k);

  for (std::size_t f = 0; f < n; ++f) {
    if (!plan[f]) continue;
    const PlannedStep &ps = *plan[f];
    const ReactionTemplate &tpl = templates[ps.template_index];
    const std::size_t slots = tpl.num_slots();

    std::vector<std::vector<CandidateReactant>> candidates(slots);
    for (std::size_t s = 0; s < slots; ++s) {
      if (ps.bound_to[s] >= 0) continue;
      if (const SlotIndex *index = catalog.find(tpl.id, s))
        candidates[s] = candidate_reactants(ps.predicted->reactants[s], tpl, *index, library, cfg.k);
    }

    // Reactant combinations over every beam route, lowest rank sum first.
    std::vector<Expansion> expansions;
    for (std::size_t b = 0; b < beam.size(); ++b) {
      std::vector<std::size_t> sizes(slots, 1);
      bool viable = true;
      for (std::size_t s = 0; s < slots; ++s) {
        if (ps.bound_to[s] >= 0) continue;
        sizes[s] = candidates[s].size();
        viable = viable && sizes[s] > 0;
      }
      if (!viable) continue;
      std::vector<std::size_t> ranks(slots, 0);
      for (;;) {
        std::size_t sum = 0;
        for (const std::size_t r : ranks) sum += r;
        expansions.push_back({b, ranks, sum});
        std::size_t s = slots;
        while (s > 0 && ++ranks[s - 1] == sizes[s - 1]) ranks[--s] = 0;
        if (s == 0) break;
      }
    }
    std::stable_sort(expansions.begin(), expansions.end(),
                     [](const Expansion &a, const Expansion &b) { return a.rank_sum < b.rank_sum; });
    if (expansions.size() > cap) expansions.resize(cap);

    const std::string predicted_key = comparison_key(ps.predicted->product);
    std::vector<Outcome> outcomes;
    for (const Expansion &e : expansions) {
      const Partial &route = beam[e.beam];
      std::vector<const Molecule *> mols(slots);
      std::string key = std::to_string(ps.template_index);
      for (std::size_t s = 0; s < slots; ++s) {
        if (ps.bound_to[s] >= 0) {
          const int pos = route.position[static_cast<std::size_t>(ps.bound_to[s])];
          mols[s] = &route.products[static_cast<std::size_t>(pos)];
          key += '|' + route.steps[static_cast<std::size_t>(pos)].product;
        } else {
          mols[s] = &candidates[s][e.ranks[s]].molecule;
          key += '|' + candidates[s][e.ranks[s]].smiles;
        }
      }
      auto it = forward_cache.find(key);
      if (it == forward_cache.end()) it = forward_cache.emplace(key, apply_forward(tpl, mols)).first;
      for (const Product &p : it->second)
        outcomes.push_back({e.beam, e.ranks, &p, smiles_string_similarity(p.smiles, ps.predicted->product),
                            p.smiles == predicted_key});
    }
    std::stable_sort(outcomes.begin(), outcomes.end(), [](const Outcome &a, const Outcome &b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.exact != b.exact) return a.exact;
      return a.product->smiles < b.product->smiles;
    });
    if (outcomes.size() > static_cast<std::size_t>(cfg.n_syn)) outcomes.resize(static_cast<std::size_t>(cfg.n_syn));

    std::vector<Partial> next;
    next.reserve(outcomes.size());
    for (const Outcome &o : outcomes) {
      Partial route = beam[o.beam];
      ReactionStep step{tpl.id, tpl.smarts_text, {}, o.product->smiles};
      for (std::size_t s = 0; s < slots; ++s) {
        if (ps.bound_to[s] >= 0) {
          const int pos = route.position[static_cast<std::size_t>(ps.bound_to[s])];
          step.reactants.push_back(route.steps[static_cast<std::size_t>(pos)].product);
        } else {
          const CandidateReactant &c = candidates[s][o.ranks[s]];
          step.reactants.push_back(c.smiles);
          if (c.novel && std::find(route.novel.begin(), route.novel.end(), c.smiles) == route.novel.end())
            route.novel.push_back(c.smiles);
        }
      }
      route.position[f] = static_cast<int>(route.steps.size());
      route.steps.push_back(std::move(step));
      route.products.push_back(o.product->molecule);
      route.score = o.score;
      next.push_back(std::move(route));
    }
    executed_any = true;
    beam = std::move(next);
    if (beam.empty()) {
      result.diagnostics.push_back("step " + std::to_string(f + 1) + ": no candidate combination reacted");
      break;
    }
  }

  if (executed_any) {
    for (Partial &p : beam) {
      ExecutedRoute route;
      route.final_product = p.steps.back().product;
      route.steps = std::move(p.steps);
      route.novel_bbs = std::move(p.novel);
      route.uses_only_library_bbs = route.novel_bbs.empty();
      result.routes.push_back(std::move(route));
    }
  }
  score_result(result, target, cfg);
  return result;
}

void score_result(ReconstructionResult &result, std::string_view target, const ReconstructionConfig &cfg) {
  const std::optional<Molecule> mol = try_parse_smiles(target);
  if (!mol) throw TargetParseError("target does not parse: " + std::string(target));
  result.target = canonical_smiles(*mol);
  const Fingerprint fp = morgan_fingerprint(*mol, cfg.analog_fp_radius, cfg.analog_fp_bits);
  const Fingerprint scaffold_fp = morgan_fingerprint(murcko_scaffold(*mol), cfg.analog_fp_radius, cfg.analog_fp_bits);
  std::unordered_map<std::string, std::pair<double, double>> memo;
  result.reconstructed = false;
  result.best_analog.reset();
  for (std::size_t i = 0; i < result.routes.size(); ++i) {
    ExecutedRoute &route = result.routes[i];
    auto it = memo.find(route.final_product);
    if (it == memo.end()) {
      std::pair<double, double> scores{0.0, 0.0};
      if (const auto product = try_parse_smiles(route.final_product)) {
        scores.first = tanimoto(fp, morgan_fingerprint(*product, cfg.analog_fp_radius, cfg.analog_fp_bits));
        scores.second = tanimoto(
            scaffold_fp, morgan_fingerprint(murcko_scaffold(*product), cfg.analog_fp_radius, cfg.analog_fp_bits));
      }
      it = memo.emplace(route.final_product, scores).first;
    }
    route.similarity_to_target = it->second.first;
    route.scaffold_similarity = it->second.second;
    if (route.final_product == result.target) result.reconstructed = true;
    if (!result.best_analog || route.similarity_to_target > result.routes[*result.best_analog].similarity_to_target)
      result.best_analog = i;
  }
}

bool replay_route(const ExecutedRoute &route, const TemplateSet &templates) {
  if (route.steps.empty() || route.steps.back().product != route.final_product) return false;
  for (const ReactionStep &step : route.steps) {
    const int t = templates.find(step.template_id);
    if (t < 0) return false;
    std::vector<Molecule> mols;
    for (const std::string &r : step.reactants) {
      auto mol = try_parse_smiles(r);
      if (!mol) return false;
      mols.push_back(std::move(*mol));
    }
    const ReactionTemplate &tpl = templates[static_cast<std::size_t>(t)];
    if (mols.size() != tpl.num_slots()) return false;
    const auto products = apply_forward(tpl, mols);
    if (std::none_of(products.begin(), products.end(), [&](const Product &p) { return p.smiles == step.product; }))
      return false;
  }
  return true;
}

std::vector<TargetResponses> group_by_target(const std::vector<ResponseRecord> &records) {
  std::vector<TargetResponses> out;
  std::map<std::string, std::size_t> where;
  for (const ResponseRecord &r : records) {
    auto [it, fresh] = where.emplace(r.target, out.size());
    if (fresh) out.push_back({r.target, {}});
    out[it->second].responses.push_back(r.response);
  }
  return out;
}

namespace {

TargetOutcome reconstruct_target(const TargetResponses &group, const TemplateSet &templates,
                                 const IndexCatalog &catalog, const BuildingBlockLibrary &library,
                                 const ReconstructionConfig &cfg) {
  TargetOutcome out;
  out.target = comparison_key(group.target);
  out.responses = group.responses.size();
  std::map<std::string, ExecutedRoute> merged;
  for (std::size_t i = 0; i < group.responses.size(); ++i) {
    const ParsedResponse parsed = parse_response(group.responses[i]);
    const auto *resp = std::get_if<LlmResponse>(&parsed);
    if (!resp) {
      ++out.parse_failures;
      out.diagnostics.push_back("response " + std::to_string(i) + ": " + std::get<ParseFailure>(parsed).reason);
      continue;
    }
    ReconstructionResult result;
    try {
      result = reconstruct(*resp, group.target, templates, catalog, library, cfg);
    } catch (const TargetParseError &e) {
      out.diagnostics.push_back(e.what());
      break;
    }
    for (const std::string &d : result.diagnostics) out.diagnostics.push_back("response " + std::to_string(i) + ": " + d);
    for (ExecutedRoute &route : result.routes) {
      if (route.final_product == result.target) {
        out.reconstructed = true;
        (route.uses_only_library_bbs ? out.reconstructed_library : out.reconstructed_novel) = true;
      }
      out.best_similarity = std::max(out.best_similarity, route.similarity_to_target);
      out.best_scaffold_similarity = std::max(out.best_scaffold_similarity, route.scaffold_similarity);
      std::string sig = route_signature(route);
      merged.emplace(std::move(sig), std::move(route));
    }
  }
  std::vector<std::pair<std::string, ExecutedRoute>> ordered(std::make_move_iterator(merged.begin()),
                                                             std::make_move_iterator(merged.end()));
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto &a, const auto &b) {
    return a.second.similarity_to_target > b.second.similarity_to_target;
  });
  for (auto &[_, route] : ordered) out.routes.push_back(std::move(route));
  return out;
}

std::string fixed3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

BatchResult batch_reconstruct(const std::vector<TargetResponses> &targets, const TemplateSet &templates,
                              const IndexCatalog &catalog, const BuildingBlockLibrary &library,
                              const ReconstructionConfig &cfg, int jobs) {
  validate_config(cfg);
  BatchResult out;
  out.outcomes.resize(targets.size());
  parallel_for(targets.size(), jobs, [&](std::size_t i) {
    out.outcomes[i] = reconstruct_target(targets[i], templates, catalog, library, cfg);
  });
  ReconstructionSummary &s = out.summary;
  s.targets = targets.size();
  double sim = 0.0;
  double scaffold = 0.0;
  for (const TargetOutcome &o : out.outcomes) {
    s.reconstructed_library += o.reconstructed_library;
    s.reconstructed_novel += o.reconstructed_novel;
    s.reconstructed_total += o.reconstructed;
    if (o.routes.empty()) continue;
    ++s.targets_with_routes;
    sim += o.best_similarity;
    scaffold += o.best_scaffold_similarity;
  }
  if (s.targets_with_routes > 0) {
    s.mean_similarity = sim / static_cast<double>(s.targets_with_routes);
    s.mean_scaffold_similarity = scaffold / static_cast<double>(s.targets_with_routes);
  }
  return out;
}

std::string ReconstructionSummary::to_json() const {
  ordered_json doc = {{"targets", targets},
                      {"targets_with_routes", targets_with_routes},
                      {"reconstructed_library_bb", reconstructed_library},
                      {"reconstructed_new_bb", reconstructed_novel},
                      {"reconstructed_total", reconstructed_total},
                      {"mean_similarity", mean_similarity},
                      {"mean_scaffold_similarity", mean_scaffold_similarity}};
  return doc.dump(2);
}

std::string ReconstructionSummary::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %-18s %-12s %-12s %-12s %-14s\n", "Targets", "Recon. Library BB",
                "Recon. New BB", "Recon. Total", "Morgan Sim.", "Scaffold Sim.");
  out << line;
  std::snprintf(line, sizeof line, "%-8zu %-18zu %-12zu %-12zu %-12s %-14s\n", targets, reconstructed_library,
                reconstructed_novel, reconstructed_total, fixed3(mean_similarity).c_str(),
                fixed3(mean_scaffold_similarity).c_str());
  out << line;
  return out.str();
}

std::string outcome_to_json(const TargetOutcome &outcome) {
  ordered_json routes = ordered_json::array();
  for (const ExecutedRoute &r : outcome.routes) routes.push_back(route_to_json(r));
  ordered_json doc = {{"target", outcome.target},
                      {"responses", outcome.responses},
                      {"parse_failures", outcome.parse_failures},
                      {"reconstructed", outcome.reconstructed},
                      {"reconstructed_library_bb", outcome.reconstructed_library},
                      {"reconstructed_new_bb", outcome.reconstructed_novel},
                      {"best_similarity", outcome.best_similarity},
                      {"best_scaffold_similarity", outcome.best_scaffold_similarity},
                      {"routes", std::move(routes)},
                      {"diagnostics", outcome.diagnostics}};
  return doc.dump(2);
}

}  // namespace synthkit
