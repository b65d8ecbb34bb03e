// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "faults.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "synthkit/bb_index.hpp"
#include "synthkit/errors.hpp"
#include "synthkit/fingerprint.hpp"
#include "synthkit/llm_client.hpp"
#include "synthkit/reconstructor.hpp"
#include "synthkit/route_gen.hpp"
#include "synthkit/smiles.hpp"
#include "synthkit/validator.hpp"

using namespace synthkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Shipped {
  BuildingBlockLibrary library = BuildingBlockLibrary::load(std::string(SYNTHKIT_DATA_DIR) + "/building_blocks.smi");
  TemplateSet templates = load_templates(std::string(SYNTHKIT_DATA_DIR) + "/templates/rxn_set_2.tsv");
  ChemicalSpace space{library, templates, jobs()};
  IndexCatalog catalog = IndexCatalog::build(library, templates, jobs());

  static int jobs() { return static_cast<int>(std::max(1U, std::thread::hardware_concurrency())); }
};

const Shipped &shipped() {
  static const Shipped s;
  return s;
}

std::string fmt(const char *format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::vector<SynthesisRoute> corpus(std::size_t n, std::uint64_t seed, RouteShape shape) {
  CorpusOptions opts;
  opts.n = n;
  opts.seed = seed;
  opts.shape = shape;
  opts.jobs = Shipped::jobs();
  return generate_routes(shipped().space, opts);
}

bool all_perfect(const BenchmarkReport &r) {
  for (const Metric *m : {&r.valid_json, &r.template_mem, &r.bb_selection, &r.valid_smiles, &r.matched_reactants,
                          &r.good_products})
    if (m->total == 0 || m->passed != m->total) return false;
  return true;
}

Outcome closure() {
  const Shipped &s = shipped();
  const auto start = std::chrono::steady_clock::now();
  std::vector<SynthesisRoute> routes = corpus(500, 42, RouteShape::kLinear);
  for (SynthesisRoute &r : corpus(100, 43, RouteShape::kBranching)) routes.push_back(std::move(r));

  std::vector<std::string> responses;
  std::vector<TargetResponses> targets;
  for (const SynthesisRoute &r : routes) {
    responses.push_back(route_to_response_json(r));
    targets.push_back({r.final_product, {responses.back()}});
  }
  const BenchmarkReport report = benchmark_corpus(responses, s.templates, Shipped::jobs());
  const BatchResult batch = batch_reconstruct(targets, s.templates, s.catalog, s.library, {}, Shipped::jobs());

  std::size_t bad_replays = 0;
  std::size_t perfect_sims = 0;
  for (const TargetOutcome &o : batch.outcomes) {
    for (const ExecutedRoute &r : o.routes) bad_replays += !replay_route(r, s.templates);
    perfect_sims += o.best_similarity == 1.0;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto &sum = batch.summary;
  const bool pass = routes.size() == 600 && sum.reconstructed_total == 600 && perfect_sims == 600 &&
                    sum.mean_similarity == 1.0 && bad_replays == 0 && all_perfect(report);
  return {pass, std::to_string(sum.reconstructed_total) + "/" + std::to_string(routes.size()) +
                    " reconstructed (500 linear + 100 branching), mean similarity " +
                    fmt("%.3f", sum.mean_similarity) + ", validator metrics " +
                    (all_perfect(report) ? "all 100%" : "below 100%") + ", " + std::to_string(bad_replays) +
                    " bad replays, " + fmt("%.1f", seconds) + " s"};
}

Outcome fault_injection() {
  using namespace synthkit::testing;
  const Shipped &s = shipped();
  std::vector<std::string> clean;
  for (const SynthesisRoute &r : corpus(200, 7, RouteShape::kLinear)) clean.push_back(route_to_response_json(r));
  const BenchmarkReport baseline = benchmark_corpus(clean, s.templates);
  if (!all_perfect(baseline)) return {false, "clean corpus is not perfect"};

  std::vector<BenchmarkReport> own;
  for (const std::string &r : clean) own.push_back(evaluate_response(r, s.templates));

  std::string detail;
  bool pass = true;
  for (const auto &[fault, name] : all_faults()) {
    std::vector<std::string> corrupted = clean;
    BenchmarkReport predicted;
    std::size_t applied = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const auto broken = applied < 20 ? inject_fault(fault, clean[i], s.templates) : std::nullopt;
      if (broken) {
        corrupted[i] = *broken;
        predicted += predicted_shift(fault, own[i]);
        ++applied;
      } else {
        predicted += own[i];
      }
    }
    const BenchmarkReport observed = benchmark_corpus(corrupted, s.templates);
    const bool ok = applied == 20 && observed == predicted;
    pass = pass && ok;
    if (!detail.empty()) detail += ", ";
    detail += std::string(name) + (ok ? " exact" : " MISMATCH");
    if (fault == Fault::kBreakJson) detail += " (Valid JSON " + fmt("%.1f%%", observed.valid_json.fraction() * 100) + ")";
  }
  return {pass, "20 of 200 responses corrupted per operator: " + detail};
}

bool same_ranking(const std::vector<ScoredDoc> &fast, const std::vector<ScoredDoc> &slow) {
  if (fast.size() != slow.size()) return false;
  for (std::size_t i = 0; i < fast.size(); ++i)
    if (fast[i].doc != slow[i].doc || std::abs(fast[i].score - slow[i].score) > 1e-12) return false;
  return true;
}

Outcome retrieval_oracle() {
  const Shipped &s = shipped();
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  std::size_t queries = 0;
  std::size_t mismatches = 0;
  for (const SlotIndex &index : s.catalog.indexes()) {
    const std::size_t k = index.members().size();
    for (int q = 0; q < 200; ++q) {
      const LibraryEntry &e = s.library[rng() % s.library.size()];
      std::string text = e.canonical;
      if (q % 4 == 3) text.insert(rng() % text.size(), "(");
      ++queries;
      mismatches += !same_ranking(index.query_tfidf_scored(text, k), testing::brute_tfidf(index, text, k));
      mismatches += !same_ranking(index.query_fp_scored(e.molecule, k), testing::brute_fp(index, e.molecule, k));
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {mismatches == 0, std::to_string(s.catalog.indexes().size()) + " indexes x 200 queries (" +
                               std::to_string(queries) + " tf-idf + " + std::to_string(queries) +
                               " fingerprint full rankings), " + std::to_string(mismatches) + " mismatches, " +
                               fmt("%.1f", seconds) + " s"};
}

/// Library blocks plus every step product of a generated corpus.
std::vector<Molecule> corpus_molecules() {
  const Shipped &s = shipped();
  std::set<std::string> seen;
  std::vector<Molecule> out;
  for (const LibraryEntry &e : s.library.entries())
    if (seen.insert(e.canonical).second) out.push_back(e.molecule);
  for (const SynthesisRoute &r : corpus(600, 99, RouteShape::kLinear))
    for (const ReactionStep &step : r.steps)
      if (seen.insert(step.product).second) out.push_back(parse_smiles(step.product));
  return out;
}

Outcome matcher_oracle() {
  std::vector<const Pattern *> patterns;
  std::vector<TemplateSet> sets;
  for (const char *name : {"rxn_set_1.tsv", "rxn_set_2.tsv"})
    sets.push_back(load_templates(std::string(SYNTHKIT_DATA_DIR) + "/templates/" + name));
  for (const TemplateSet &set : sets)
    for (std::size_t t = 0; t < set.size(); ++t)
      for (const Pattern &p : set[t].reactant_patterns) patterns.push_back(&p);

  std::vector<Molecule> small;
  for (Molecule &m : corpus_molecules())
    if (m.num_atoms() <= 8) small.push_back(std::move(m));

  std::size_t pairs = 0;
  std::size_t with_match = 0;
  std::size_t mismatches = 0;
  for (const Pattern *p : patterns)
    for (const Molecule &m : small) {
      std::vector<std::vector<int>> fast;
      for (const Match &x : match_substructure(*p, m)) fast.push_back(x.atom_assignment);
      std::sort(fast.begin(), fast.end());
      const auto slow = testing::brute_force_matches(*p, m);
      ++pairs;
      with_match += !slow.empty();
      mismatches += fast != slow;
    }
  return {mismatches == 0 && !small.empty(),
          std::to_string(patterns.size()) + " shipped reactant patterns x " + std::to_string(small.size()) +
              " molecules of at most 8 heavy atoms (" + std::to_string(pairs) + " pairs, " +
              std::to_string(with_match) + " matching), " + std::to_string(mismatches) + " mismatches"};
}

Outcome chemistry_invariants() {
  const std::vector<Molecule> mols = corpus_molecules();
  std::mt19937 rng(31337);
  std::size_t roundtrip_failures = 0;
  std::size_t permutation_failures = 0;
  std::size_t scaffold_failures = 0;
  std::size_t tanimoto_failures = 0;
  std::vector<Fingerprint> fps;
  for (const Molecule &m : mols) {
    const std::string canon = canonical_smiles(m);
    const auto back = try_parse_smiles(canon);
    roundtrip_failures += !back || canonical_smiles(*back) != canon;
    std::vector<int> order(m.num_atoms());
    std::iota(order.begin(), order.end(), 0);
    for (int trial = 0; trial < 100; ++trial) {
      std::shuffle(order.begin(), order.end(), rng);
      permutation_failures += canonical_smiles(permute_atoms(m, order)) != canon;
    }
    const Molecule scaffold = murcko_scaffold(m);
    scaffold_failures += canonical_smiles(murcko_scaffold(scaffold)) != canonical_smiles(scaffold);
    fps.push_back(morgan_fingerprint(m, kMorganRadius, kAnalogFpBits));
  }
  for (std::size_t i = 0; i < fps.size(); ++i) {
    const double self = tanimoto(fps[i], fps[i]);
    tanimoto_failures += fps[i].popcount() > 0 && self != 1.0;
    for (int t = 0; t < 20; ++t) {
      const std::size_t j = rng() % fps.size();
      const double a = tanimoto(fps[i], fps[j]);
      const double b = tanimoto(fps[j], fps[i]);
      tanimoto_failures += a != b || a < 0.0 || a > 1.0 || ((a == 1.0) != (fps[i] == fps[j])) ||
                           std::abs(a - testing::brute_tanimoto(fps[i], fps[j])) > 1e-12;
    }
  }
  const bool pass = mols.size() >= 1000 && roundtrip_failures == 0 && permutation_failures == 0 &&
                    scaffold_failures == 0 && tanimoto_failures == 0;
  return {pass, std::to_string(mols.size()) + " molecules x 100 permutations: " +
                    std::to_string(roundtrip_failures) + " round-trip, " + std::to_string(permutation_failures) +
                    " permutation, " + std::to_string(tanimoto_failures) + " Tanimoto property, " +
                    std::to_string(scaffold_failures) + " scaffold idempotence failures"};
}

std::vector<std::vector<std::string>> read_tsv(const std::string &name) {
  std::ifstream in(std::string(SYNTHKIT_FIXTURE_DIR) + "/" + name);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ss(line);
    for (std::string cell; std::getline(ss, cell, '\t');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Outcome pinned_constants() {
  const Shipped &s = shipped();
  std::vector<std::string> failed;
  auto check = [&failed](bool ok, const std::string &what) {
    if (!ok) failed.push_back(what);
  };
  check(kNgramCap == 1024, "n-gram cap");
  check(kMinNgram == 2 && kMaxNgram == 3, "n-gram lengths");
  check(kBuildingBlockFpBits == 256 && kMorganRadius == 2, "building-block fingerprint");
  check(kAnalogFpBits == 4096 && ReconstructionConfig{}.analog_fp_bits == 4096, "analog fingerprint");
  check(kMaxRouteSteps == 5, "route depth cap");
  bool vocab_ok = true;
  for (const SlotIndex &index : s.catalog.indexes()) {
    vocab_ok = vocab_ok && index.vocab().ngrams.size() <= kNgramCap;
    for (const std::string &g : index.vocab().ngrams) {
      const auto tokens = 1 + std::count(g.begin(), g.end(), ' ');
      vocab_ok = vocab_ok && tokens >= 2 && tokens <= 3;
    }
    for (const Fingerprint &fp : index.fingerprints()) vocab_ok = vocab_ok && fp.nbits() == 256 && fp.radius() == 2;
  }
  check(vocab_ok, "index vocabularies and fingerprints");
  for (const SynthesisRoute &r : corpus(200, 5, RouteShape::kLinear))
    if (r.steps.size() > 5) {
      check(false, "generated route longer than 5 steps");
      break;
    }

  std::map<std::string, std::multiset<std::tuple<double, double, int>>> golden;
  for (const auto &row : read_tsv("sampling_plans.tsv"))
    golden[row[0]].insert({std::stod(row[1]), std::stod(row[2]), std::stoi(row[3])});
  bool plans_ok = golden.size() == plan_names().size() && golden.size() == 6;
  for (const std::string &name : plan_names()) {
    std::multiset<std::tuple<double, double, int>> got;
    for (const SamplingSetting &st : sampling_plan(name).settings) got.insert({st.temperature, st.top_p, st.repeats});
    plans_ok = plans_ok && golden.count(name) && golden[name] == got;
  }
  plans_ok = plans_ok && sampling_plan("greedy").total() == 10 && sampling_plan("frugal").total() == 4;
  check(plans_ok, "sampling plans");

  const std::vector<std::tuple<std::string, std::string, int, int>> tasks = {
      {"llm-benchmark", "frozen-only", 5, 25},
      {"synthesis-planning", "greedy", 5, 25},
      {"synthesizable-analog", "high-only", 10, 50},
      {"hit-expansion", "high-only", 20, 100}};
  bool tasks_ok = task_table().size() == tasks.size();
  for (const auto &[task, plan, k, n_syn] : tasks) {
    const TaskDefaults &d = task_defaults(task);
    tasks_ok = tasks_ok && d.plan == plan && d.k == k && d.n_syn == n_syn;
    cli::Overrides f;
    f.task = task;
    const cli::RunConfig cfg = cli::resolve_config(f);
    tasks_ok = tasks_ok && cfg.plan == plan && cfg.k == k && cfg.n_syn == n_syn;
  }
  check(tasks_ok, "task defaults");

  std::string detail = "n-gram cap 1024 (bigram+trigram), BB fingerprint 256-bit r2, analog 4096-bit, depth 5, "
                       "6 sampling plans, 4 task defaults";
  if (!failed.empty()) {
    detail = "failed:";
    for (const std::string &f : failed) detail += " [" + f + "]";
  }
  return {failed.empty(), detail};
}

Outcome fallback() {
  const Shipped &s = shipped();
  std::size_t queries = 0;
  std::size_t empty = 0;
  std::size_t wrong_path = 0;
  for (const SlotIndex &index : s.catalog.indexes()) {
    for (std::size_t m = 0; m < std::min<std::size_t>(5, index.member_smiles().size()); ++m) {
      for (const std::string &text : {index.member_smiles()[m] + "(", "1" + index.member_smiles()[m],
                                      index.member_smiles()[m] + "[Zz]"}) {
        if (try_parse_smiles(text)) continue;
        ++queries;
        const auto hits = index.combined_query(text, 5);
        empty += hits.empty();
        wrong_path += hits != index.query_tfidf(text, 5);
      }
    }
  }
  // The reconstructor still gets candidates for an unparseable predicted block.
  const int t = s.templates.find("R01");
  const SlotIndex *slot = s.catalog.find("R01", 1);
  std::size_t candidates = 0;
  if (t >= 0 && slot)
    candidates = candidate_reactants("NCc1ccc(C2CC2)cc1(", s.templates[static_cast<std::size_t>(t)], *slot,
                                     s.library, 5)
                     .size();
  const bool pass = queries > 0 && empty == 0 && wrong_path == 0 && candidates > 0;
  return {pass, std::to_string(queries) + " invalid-SMILES queries: " + std::to_string(empty) + " empty, " +
                    std::to_string(wrong_path) + " off the tf-idf-only path; reconstructor candidates for an "
                    "invalid block: " + std::to_string(candidates)};
}

Outcome degradation() {
  const Shipped &s = shipped();
  const std::string planted = *canonicalize("NCc1ccc(C2CC2)cc1");
  const std::string acid = *canonicalize("OC(=O)c1ccc(F)cc1");
  const int t = s.templates.find("R01");
  if (t < 0 || !s.library.contains(planted) || !s.library.contains(acid)) return {false, "fixture missing"};
  const ReactionTemplate &amide = s.templates[static_cast<std::size_t>(t)];
  const auto products = apply_forward(amide, std::vector<Molecule>{parse_smiles(acid), parse_smiles(planted)});
  if (products.empty()) return {false, "fixture does not react"};
  SynthesisRoute route;
  route.steps.push_back({amide.id, amide.smarts_text, {acid, planted}, products.front().smiles});
  route.final_product = products.front().smiles;
  route.building_blocks = route_building_blocks(route.steps);

  // Oracle: nearest remaining block to the planted one, by linear scan.
  const Fingerprint planted_fp = morgan_fingerprint(parse_smiles(planted), kMorganRadius, kAnalogFpBits);
  double oracle = -1.0;
  std::string twin;
  for (const LibraryEntry &e : s.library.entries()) {
    if (e.canonical == planted) continue;
    const double sim = tanimoto(planted_fp, morgan_fingerprint(e.molecule, kMorganRadius, kAnalogFpBits));
    if (sim > oracle) {
      oracle = sim;
      twin = e.canonical;
    }
  }

  const auto response = std::get<LlmResponse>(parse_response(route_to_response_json(route)));
  const ReconstructionResult before = reconstruct(response, route.final_product, s.templates, s.catalog, s.library);
  const BuildingBlockLibrary reduced = s.library.without({planted});
  const IndexCatalog catalog = IndexCatalog::build(reduced, s.templates);
  const ReconstructionResult after = reconstruct(response, route.final_product, s.templates, catalog, reduced);
  double best = 0.0;
  for (const ExecutedRoute &r : after.routes)
    if (r.uses_only_library_bbs && replay_route(r, s.templates)) best = std::max(best, r.similarity_to_target);
  const bool pass = before.reconstructed && best < 1.0 && best >= oracle;
  return {pass, "planted " + planted + ", twin " + twin + " (Tanimoto " + fmt("%.3f", oracle) +
                    "); best library-only analog after deletion " + fmt("%.3f", best)};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "synthkit");
  std::vector<const char *> argv;
  for (const std::string &a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome mock_pipeline() {
  using namespace synthkit::testing;
  const Shipped &s = shipped();
  const fs::path dir = fs::temp_directory_path() / "synthkit_acceptance_pipeline";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Ten targets; the canned responses mix clean routes with corrupted ones.
  const auto routes = corpus(10, 77, RouteShape::kLinear);
  const SamplingPlan plan = sampling_plan("greedy");
  std::string targets;
  std::size_t canned = 0;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    targets += routes[i].final_product + "\n";
    const std::string clean = route_to_response_json(routes[i]);
    std::size_t n = 0;
    for (const SamplingSetting &st : plan.settings)
      for (int rep = 0; rep < st.repeats; ++rep, ++n) {
        const Fault fault = all_faults()[(i + n) % all_faults().size()].first;
        const auto broken = n % 3 == 2 ? inject_fault(fault, clean, s.templates) : std::nullopt;
        MockBackend::store(dir / "mock", routes[i].final_product, st.temperature, st.top_p, rep,
                           broken ? *broken : clean);
        ++canned;
      }
  }
  {
    std::ofstream out(dir / "targets.smi");
    out << targets;
  }

  const std::string t = (dir / "targets.smi").string();
  const std::string mock = (dir / "mock").string();
  const std::vector<std::vector<std::string>> runs = {
      {"--out", (dir / "a").string(), "--jobs", "1", "pipeline", "--targets", t, "--mock-dir", mock},
      {"--out", (dir / "b").string(), "--jobs", "1", "pipeline", "--targets", t, "--mock-dir", mock},
      {"--out", (dir / "c").string(), "--jobs", "4", "pipeline", "--targets", t, "--mock-dir", mock,
       "--concurrency", "3"}};
  for (const auto &args : runs)
    if (invoke_cli(args) != cli::kExitOk) {
      fs::remove_all(dir);
      return {false, "pipeline run failed"};
    }

  std::vector<fs::path> files;
  for (const auto &entry : fs::recursive_directory_iterator(dir / "a"))
    if (entry.is_regular_file() && entry.path().filename() != "resolved_config.json")
      files.push_back(fs::relative(entry.path(), dir / "a"));
  std::sort(files.begin(), files.end());
  std::size_t differing = 0;
  for (const fs::path &f : files)
    for (const char *other : {"b", "c"}) differing += slurp(dir / "a" / f) != slurp(dir / other / f);

  const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "a/summary.json"));
  const std::string jsonl = slurp(dir / "a/responses.jsonl");
  const auto records = static_cast<std::size_t>(std::count(jsonl.begin(), jsonl.end(), '\n'));
  fs::remove_all(dir);
  const bool pass = differing == 0 && records == 100 && canned == 100 && summary["targets"] == 10 &&
                    files.size() >= 14;
  return {pass, "greedy plan x 10 targets = " + std::to_string(records) + " mock inferences; " +
                    std::to_string(files.size()) + " output files identical across 2 runs at --jobs 1 and 1 run "
                    "at --jobs 4 (" + std::to_string(differing) + " differences); " +
                    summary["reconstructed_total"].dump() + "/10 reconstructed"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closure reconstruction", closure},
      {"fault-injection fidelity", fault_injection},
      {"retrieval oracle", retrieval_oracle},
      {"matcher oracle", matcher_oracle},
      {"chemistry invariants", chemistry_invariants},
      {"pinned constants", pinned_constants},
      {"fallback behavior", fallback},
      {"degradation analog", degradation},
      {"end-to-end mock pipeline", mock_pipeline},
  };
  int failures = 0;
  for (const auto &[name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " acceptance criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
