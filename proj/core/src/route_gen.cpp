// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/route_gen.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "synthkit/errors.hpp"
#include "synthkit/fingerprint.hpp"
#include "synthkit/parallel.hpp"

namespace synthkit {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kStartAttempts = 64;
constexpr int kExtendAttempts = 8;

struct Intermediate {
  Molecule molecule;
  std::string smiles;
};

class RouteBuilder {
 public:
  RouteBuilder(const ChemicalSpace &space, Rng &rng, const RouteOptions &opts)
      : space_(space), rng_(rng), opts_(opts) {}

  /// Applies a template and records the step; returns the chosen product.
  std::optional<Intermediate> run_step(std::size_t tpl, const std::vector<const Molecule *> &reactants,
                                       const std::vector<std::string> &reactant_smiles) {
    const ReactionTemplate &t = space_.templates()[tpl];
    std::vector<Product> products = apply_forward(t, reactants);
    if (opts_.product_filter) {
      std::erase_if(products, [&](const Product &p) { return !opts_.product_filter(p.molecule); });
    }
    if (products.empty()) return std::nullopt;
    Product &chosen = products[rng_.uniform(products.size())];
    steps_.push_back({t.id, t.smarts_text, reactant_smiles, chosen.smiles});
    return Intermediate{std::move(chosen.molecule), chosen.smiles};
  }

  const LibraryEntry &random_bb(std::size_t tpl, std::size_t slot) {
    const auto &pool = space_.compatible(tpl, slot);
    return space_.library()[static_cast<std::size_t>(pool[rng_.uniform(pool.size())])];
  }

  std::optional<Intermediate> start() {
    const TemplateSet &templates = space_.templates();
    std::uint64_t total = 0;
    for (std::size_t t = 0; t < templates.size(); ++t) total += space_.combinations(t);
    if (total == 0) throw NoViableStart("no template has compatible building blocks for every slot");
    for (int attempt = 0; attempt < kStartAttempts; ++attempt) {
      std::uint64_t r = rng_.uniform(total);
      std::size_t tpl = 0;
      while (r >= space_.combinations(tpl)) r -= space_.combinations(tpl++);
      std::vector<const Molecule *> mols;
      std::vector<std::string> smiles;
      for (std::size_t s = 0; s < templates[tpl].num_slots(); ++s) {
        const LibraryEntry &bb = random_bb(tpl, s);
        mols.push_back(&bb.molecule);
        smiles.push_back(bb.canonical);
      }
      if (auto product = run_step(tpl, mols, smiles)) return product;
    }
    return std::nullopt;
  }

  /// Extends from `current` until no template applies or the step cap is hit.
  Intermediate extend(Intermediate current, int max_steps) {
    const TemplateSet &templates = space_.templates();
    while (static_cast<int>(steps_.size()) < max_steps) {
      std::vector<std::pair<std::size_t, std::size_t>> options;
      for (std::size_t t = 0; t < templates.size(); ++t) {
        for (std::size_t s = 0; s < templates[t].num_slots(); ++s) {
          bool others_filled = true;
          for (std::size_t o = 0; o < templates[t].num_slots(); ++o)
            if (o != s && space_.compatible(t, o).empty()) others_filled = false;
          if (others_filled && has_substructure(templates[t].reactant_patterns[s], current.molecule))
            options.emplace_back(t, s);
        }
      }
      if (options.empty()) break;
      std::optional<Intermediate> next;
      for (int attempt = 0; attempt < kExtendAttempts && !next; ++attempt) {
        const auto [tpl, slot] = options[rng_.uniform(options.size())];
        std::vector<const Molecule *> mols;
        std::vector<std::string> smiles;
        for (std::size_t s = 0; s < templates[tpl].num_slots(); ++s) {
          if (s == slot) {
            mols.push_back(&current.molecule);
            smiles.push_back(current.smiles);
          } else {
            const LibraryEntry &bb = random_bb(tpl, s);
            mols.push_back(&bb.molecule);
            smiles.push_back(bb.canonical);
          }
        }
        next = run_step(tpl, mols, smiles);
      }
      if (!next) break;
      current = std::move(*next);
    }
    return current;
  }

  std::vector<ReactionStep> &steps() { return steps_; }

 private:
  const ChemicalSpace &space_;
  Rng &rng_;
  const RouteOptions &opts_;
  std::vector<ReactionStep> steps_;
};

SynthesisRoute finish(std::vector<ReactionStep> steps, RouteShape shape) {
  SynthesisRoute route;
  route.final_product = steps.back().product;
  route.building_blocks = route_building_blocks(steps);
  route.steps = std::move(steps);
  route.shape = shape;
  return route;
}

struct SubRoute {
  std::vector<ReactionStep> steps;
  Intermediate product;
};

SubRoute linear_subroute(const ChemicalSpace &space, Rng &rng, const RouteOptions &opts, int max_steps) {
  RouteBuilder builder(space, rng, opts);
  std::optional<Intermediate> first = builder.start();
  if (!first) throw NoViableStart("no sampled start produced a product");
  Intermediate last = builder.extend(std::move(*first), max_steps);
  return {std::move(builder.steps()), std::move(last)};
}

}  // namespace

std::vector<std::string> route_building_blocks(const std::vector<ReactionStep> &steps) {
  std::unordered_set<std::string> products;
  for (const ReactionStep &s : steps) products.insert(s.product);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const ReactionStep &s : steps)
    for (const std::string &r : s.reactants)
      if (!products.count(r) && seen.insert(r).second) out.push_back(r);
  return out;
}

std::uint64_t Rng::uniform(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform draw over an empty range");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index ^ 0x9e37'79b9'7f4a'7c15ULL));
}

ChemicalSpace::ChemicalSpace(const BuildingBlockLibrary &library, const TemplateSet &templates, int jobs)
    : library_(&library), templates_(&templates), compatible_(templates.size()) {
  for (std::size_t t = 0; t < templates.size(); ++t) compatible_[t].resize(templates[t].num_slots());
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t t = 0; t < templates.size(); ++t)
    for (std::size_t s = 0; s < templates[t].num_slots(); ++s) work.emplace_back(t, s);
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    const auto [t, s] = work[i];
    compatible_[t][s] = compatible_bbs(library, templates[t], s);
  });
}

std::uint64_t ChemicalSpace::combinations(std::size_t tpl) const {
  std::uint64_t product = 1;
  for (const auto &slot : compatible_[tpl]) product *= slot.size();
  return product;
}

SynthesisRoute sample_route(const ChemicalSpace &space, std::uint64_t seed, const RouteOptions &opts) {
  Rng rng(seed);
  SubRoute sub = linear_subroute(space, rng, opts, std::min(opts.max_steps, kMaxRouteSteps));
  return finish(std::move(sub.steps), RouteShape::kLinear);
}

SynthesisRoute sample_branching_route(const ChemicalSpace &space, std::uint64_t seed, const RouteOptions &opts) {
  const int cap = std::min(opts.max_steps, kMaxRouteSteps);
  if (cap < 3) throw NoBranchingFound("branching routes need at least 3 steps");
  const TemplateSet &templates = space.templates();
  for (int attempt = 0; attempt < opts.branching_attempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    const int la = 1 + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(std::min(2, cap - 2))));
    const int lb = 1 + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(std::min(2, cap - 1 - la))));
    SubRoute a = linear_subroute(space, rng, opts, la);
    SubRoute b = linear_subroute(space, rng, opts, lb);
    if (a.product.smiles == b.product.smiles) continue;

    std::vector<std::pair<std::size_t, std::size_t>> joins;  // (template, slot of a)
    for (std::size_t t = 0; t < templates.size(); ++t) {
      if (templates[t].num_slots() != 2) continue;
      for (std::size_t s = 0; s < 2; ++s) {
        if (has_substructure(templates[t].reactant_patterns[s], a.product.molecule) &&
            has_substructure(templates[t].reactant_patterns[1 - s], b.product.molecule))
          joins.emplace_back(t, s);
      }
    }
    if (joins.empty()) continue;
    const auto [tpl, slot_a] = joins[rng.uniform(joins.size())];

    RouteBuilder builder(space, rng, opts);
    builder.steps() = std::move(a.steps);
    builder.steps().insert(builder.steps().end(), b.steps.begin(), b.steps.end());
    std::vector<const Molecule *> mols(2);
    std::vector<std::string> smiles(2);
    mols[slot_a] = &a.product.molecule;
    smiles[slot_a] = a.product.smiles;
    mols[1 - slot_a] = &b.product.molecule;
    smiles[1 - slot_a] = b.product.smiles;
    std::optional<Intermediate> joined = builder.run_step(tpl, mols, smiles);
    if (!joined) continue;
    builder.extend(std::move(*joined), cap);
    return finish(std::move(builder.steps()), RouteShape::kBranching);
  }
  throw NoBranchingFound("no branching route found in " + std::to_string(opts.branching_attempts) + " attempts");
}

std::string route_to_response_json(const SynthesisRoute &route) {
  ordered_json reactions = ordered_json::array();
  for (auto it = route.steps.rbegin(); it != route.steps.rend(); ++it) {
    ordered_json step;
    step["reaction_template"] = it->template_smarts;
    step["reactants"] = it->reactants;
    step["product"] = it->product;
    reactions.push_back(std::move(step));
  }
  ordered_json doc;
  doc["reactions"] = std::move(reactions);
  doc["building_blocks"] = route.building_blocks;
  return doc.dump();
}

PromptResponsePair route_to_pair(const SynthesisRoute &route, const std::string &instruction) {
  return {instruction, route.final_product, route_to_response_json(route)};
}

std::string load_instruction(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open instruction file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

std::vector<SynthesisRoute> generate_routes(const ChemicalSpace &space, const CorpusOptions &opts) {
  auto sample = [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(opts.seed, i);
    return opts.shape == RouteShape::kBranching ? sample_branching_route(space, seed, opts.route)
                                                : sample_route(space, seed, opts.route);
  };
  std::vector<SynthesisRoute> out;
  std::set<std::string> seen;
  std::size_t next_index = 0;
  // Batches are drawn in parallel and filtered in index order, so the kept
  // routes do not depend on the thread count.
  while (out.size() < opts.n) {
    const std::size_t batch = opts.n - out.size();
    std::vector<SynthesisRoute> drawn(batch);
    parallel_for(batch, opts.jobs, [&](std::size_t i) { drawn[i] = sample(next_index + i); });
    next_index += batch;
    for (SynthesisRoute &r : drawn) {
      if (opts.unique_targets && !seen.insert(r.final_product).second) continue;
      out.push_back(std::move(r));
    }
    if (opts.unique_targets && next_index > 50 * opts.n + 1000)
      throw NoViableStart("could not find " + std::to_string(opts.n) + " distinct targets");
  }
  return out;
}

std::string pair_to_jsonl(const PromptResponsePair &pair) {
  ordered_json j;
  j["instruction"] = pair.instruction;
  j["input"] = pair.input;
  j["output"] = pair.output;
  return j.dump();
}

void write_corpus(const std::filesystem::path &path, const std::vector<PromptResponsePair> &pairs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write corpus " + path.string());
  for (const PromptResponsePair &p : pairs) out << pair_to_jsonl(p) << '\n';
  if (!out) throw IoError("failed writing corpus " + path.string());
}

std::vector<PromptResponsePair> read_corpus(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus " + path.string());
  std::vector<PromptResponsePair> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      pairs.push_back({j.at("instruction").get<std::string>(), j.at("input").get<std::string>(),
                       j.at("output").get<std::string>()});
    } catch (const nlohmann::json::exception &e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return pairs;
}

}  // namespace synthkit
