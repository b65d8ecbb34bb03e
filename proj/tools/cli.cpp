// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "synthkit/bb_index.hpp"
#include "synthkit/errors.hpp"
#include "synthkit/library.hpp"
#include "synthkit/llm_client.hpp"
#include "synthkit/reconstructor.hpp"
#include "synthkit/route_gen.hpp"
#include "synthkit/smiles.hpp"
#include "synthkit/validator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace synthkit::cli {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

const std::set<std::string> kTopKeys = {"version", "library", "templates", "instruction", "index", "task", "plan",
                                        "k",       "n_syn",   "seed",      "out",         "jobs",  "backend"};
const std::set<std::string> kBackendKeys = {"kind",  "mock_dir",       "url",     "format",      "model",
                                            "timeout", "auth_token_env", "concurrency", "max_tokens"};
const std::set<std::string> kPathKeys = {"library", "templates", "instruction", "index", "out"};

template <typename T>
T pick(const std::optional<T> &flag, const json &doc, const char *key, T fallback) {
  if (flag) return *flag;
  if (doc.contains(key)) {
    try {
      return doc.at(key).get<T>();
    } catch (const json::exception &) {
      throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
  }
  return fallback;
}

void check_keys(const json &doc, const std::set<std::string> &allowed, const std::string &where) {
  for (const auto &[key, _] : doc.items())
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "' in " + where);
}

std::string read_text(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

/// One target per line: a SMILES (first field) or a JSON object with
/// target_smiles or input.
std::vector<std::string> read_targets(const fs::path &path) {
  std::vector<std::string> out;
  std::istringstream in(read_text(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (line[first] == '{') {
      const json doc = json::parse(line, nullptr, false);
      if (doc.is_object()) {
        for (const char *key : {"target_smiles", "input"})
          if (doc.contains(key) && doc[key].is_string()) {
            out.push_back(doc[key].get<std::string>());
            break;
          }
        continue;
      }
    }
    std::istringstream fields(line);
    std::string smiles;
    fields >> smiles;
    out.push_back(smiles);
  }
  return out;
}

struct Inputs {
  BuildingBlockLibrary library;
  TemplateSet templates;
};

Inputs load_inputs(const RunConfig &cfg) {
  return {BuildingBlockLibrary::load(cfg.library), load_templates(cfg.templates)};
}

IndexCatalog load_or_build_index(const RunConfig &cfg, const Inputs &in) {
  if (!cfg.index.empty()) return IndexCatalog::load_dir(cfg.index);
  return IndexCatalog::build(in.library, in.templates, cfg.jobs);
}

std::unique_ptr<Backend> make_backend(const RunConfig &cfg) {
  const BackendConfig &b = cfg.backend;
  if (b.kind == "mock") {
    if (b.mock_dir.empty()) throw ConfigError("the mock backend needs --mock-dir");
    if (!fs::is_directory(b.mock_dir)) throw ConfigError("mock directory not found: " + b.mock_dir);
    return std::make_unique<MockBackend>(b.mock_dir);
  }
  if (b.kind == "http") {
    HttpOptions opts;
    opts.url = b.url;
    opts.format = parse_wire_format(b.format);
    opts.model = b.model;
    opts.timeout_seconds = b.timeout;
    if (!b.auth_token_env.empty())
      if (const char *token = std::getenv(b.auth_token_env.c_str())) opts.auth_token = token;
    return std::make_unique<HttpBackend>(opts);
  }
  throw ConfigError("unknown backend kind: " + b.kind);
}

ReconstructionConfig reconstruction_config(const RunConfig &cfg) {
  ReconstructionConfig rc;
  rc.k = cfg.k;
  rc.n_syn = cfg.n_syn;
  validate_config(rc);
  return rc;
}

bool all_targets_parse(const std::vector<TargetResponses> &groups, std::ostream &err) {
  bool ok = true;
  for (const TargetResponses &g : groups)
    if (!canonicalize(g.target)) {
      err << "warning: target does not parse: '" << g.target << "'\n";
      ok = false;
    }
  return ok;
}

/// Writes per-target results and the summary; returns the summary table.
std::string write_reconstruction(const RunConfig &cfg, const BatchResult &batch) {
  const fs::path dir = fs::path(cfg.out) / "reconstruction";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < batch.outcomes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.json", i);
    write_text(dir / name, outcome_to_json(batch.outcomes[i]) + "\n");
  }
  write_text(fs::path(cfg.out) / "summary.json", batch.summary.to_json() + "\n");
  const std::string table = batch.summary.to_table();
  write_text(fs::path(cfg.out) / "summary.txt", table);
  return table;
}

std::string write_benchmark(const RunConfig &cfg, const std::vector<ResponseRecord> &records,
                            const TemplateSet &templates) {
  std::vector<std::string> texts;
  texts.reserve(records.size());
  for (const ResponseRecord &r : records) texts.push_back(r.response);
  const BenchmarkReport report = benchmark_corpus(texts, templates, cfg.jobs);
  write_text(fs::path(cfg.out) / "benchmark.json", report.to_json() + "\n");
  const std::string table = report.to_table();
  write_text(fs::path(cfg.out) / "benchmark.txt", table);
  return table;
}

std::vector<ResponseRecord> to_response_records(const std::vector<InferenceRecord> &records) {
  std::vector<ResponseRecord> out;
  out.reserve(records.size());
  for (const InferenceRecord &r : records) out.push_back({r.target_smiles, r.response, r.error});
  return out;
}

std::vector<InferenceRecord> dispatch(const RunConfig &cfg, const std::vector<std::string> &targets,
                                      std::ostream &out) {
  const SamplingPlan plan = sampling_plan(cfg.plan);
  const std::unique_ptr<Backend> backend = make_backend(cfg);
  const std::string instruction = load_instruction(cfg.instruction);
  RunOptions opts;
  opts.concurrency = cfg.backend.concurrency;
  opts.max_tokens = cfg.backend.max_tokens;
  opts.cancel = &g_interrupted;
  auto records = run_task(targets, plan, *backend, instruction, opts);
  out << records.size() << " inferences (" << targets.size() << " targets x " << plan.total() << ", plan "
      << plan.name << ")\n";
  return records;
}

std::size_t count_errors(const std::vector<InferenceRecord> &records, std::ostream &err) {
  std::size_t n = 0;
  for (const InferenceRecord &r : records)
    if (!r.error.empty()) {
      if (n++ < 5) err << "warning: " << r.target_smiles << " (T=" << r.temperature << "): " << r.error << "\n";
    }
  if (n > 5) err << "warning: " << n - 5 << " more failed inferences\n";
  return n;
}

std::string describe_plan(const RunConfig &cfg, std::size_t targets) {
  const SamplingPlan plan = sampling_plan(cfg.plan);
  std::ostringstream ss;
  ss << "plan " << plan.name << ": " << plan.total() << " inferences per target\n";
  for (const SamplingSetting &s : plan.settings)
    ss << "  T=" << s.temperature << " TopP=" << s.top_p << " x" << s.repeats << "\n";
  ss << "targets: " << targets << ", total inferences: " << targets * static_cast<std::size_t>(plan.total())
     << "\n";
  return ss.str();
}

// Subcommands. Each returns an exit code; usage errors are thrown.

int cmd_gen_data(const RunConfig &cfg, std::size_t n, const std::string &shape, bool unique,
                 const std::string &emit_mock, std::ostream &out) {
  const Inputs in = load_inputs(cfg);
  const std::string instruction = load_instruction(cfg.instruction);
  CorpusOptions opts;
  opts.n = n;
  opts.seed = cfg.seed;
  opts.jobs = cfg.jobs;
  opts.unique_targets = unique;
  if (shape == "linear") {
    opts.shape = RouteShape::kLinear;
  } else if (shape == "branching") {
    opts.shape = RouteShape::kBranching;
  } else {
    throw ConfigError("unknown route shape: " + shape);
  }
  const ChemicalSpace space(in.library, in.templates, cfg.jobs);
  const std::vector<SynthesisRoute> routes = generate_routes(space, opts);

  std::vector<PromptResponsePair> pairs;
  std::string targets;
  for (const SynthesisRoute &r : routes) {
    pairs.push_back(route_to_pair(r, instruction));
    targets += r.final_product + "\n";
  }
  fs::create_directories(cfg.out);
  write_corpus(fs::path(cfg.out) / "corpus.jsonl", pairs);
  write_text(fs::path(cfg.out) / "targets.smi", targets);
  out << "wrote " << pairs.size() << " routes to " << (fs::path(cfg.out) / "corpus.jsonl").string() << "\n";

  if (!emit_mock.empty()) {
    const SamplingPlan plan = sampling_plan(cfg.plan);
    for (const PromptResponsePair &p : pairs)
      for (const SamplingSetting &s : plan.settings)
        for (int rep = 0; rep < s.repeats; ++rep)
          MockBackend::store(emit_mock, p.input, s.temperature, s.top_p, rep, p.output);
    out << "stored " << pairs.size() * static_cast<std::size_t>(plan.total()) << " canned responses in "
        << emit_mock << "\n";
  }
  return kExitOk;
}

int cmd_build_index(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  const Inputs in = load_inputs(cfg);
  const IndexCatalog catalog = IndexCatalog::build(in.library, in.templates, cfg.jobs);
  for (const std::string &d : catalog.diagnostics()) err << "warning: " << d << "\n";
  const fs::path dir = cfg.index.empty() ? fs::path(cfg.out) / "index" : fs::path(cfg.index);
  fs::remove_all(dir);
  catalog.save_dir(dir);
  out << "built " << catalog.indexes().size() << " slot indexes in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_validate(const RunConfig &cfg, const std::string &responses, std::ostream &out) {
  const TemplateSet templates = load_templates(cfg.templates);
  out << write_benchmark(cfg, read_responses(responses), templates);
  return kExitOk;
}

int cmd_infer(const RunConfig &cfg, const std::string &targets_path, bool latency, std::ostream &out,
              std::ostream &err) {
  const auto targets = read_targets(targets_path);
  const auto records = dispatch(cfg, targets, out);
  fs::create_directories(cfg.out);
  write_records(fs::path(cfg.out) / "responses.jsonl", records, latency);
  return count_errors(records, err) ? kExitPartial : kExitOk;
}

int cmd_reconstruct(const RunConfig &cfg, const std::string &responses, std::ostream &out, std::ostream &err) {
  const ReconstructionConfig rc = reconstruction_config(cfg);
  const Inputs in = load_inputs(cfg);
  const auto records = read_responses(responses);
  const IndexCatalog catalog = load_or_build_index(cfg, in);
  const auto groups = group_by_target(records);
  bool ok = all_targets_parse(groups, err);
  for (const ResponseRecord &r : records) ok = ok && r.error.empty();
  const BatchResult batch = batch_reconstruct(groups, in.templates, catalog, in.library, rc, cfg.jobs);
  out << write_reconstruction(cfg, batch);
  return ok ? kExitOk : kExitPartial;
}

int cmd_pipeline(const RunConfig &cfg, const std::string &targets_path, bool dry_run, std::ostream &out,
                 std::ostream &err) {
  const auto targets = read_targets(targets_path);
  if (dry_run) {
    out << cfg.to_json().dump(2) << "\n" << describe_plan(cfg, targets.size());
    return kExitOk;
  }
  const ReconstructionConfig rc = reconstruction_config(cfg);
  const Inputs in = load_inputs(cfg);
  const auto records = dispatch(cfg, targets, out);
  fs::create_directories(cfg.out);
  write_text(fs::path(cfg.out) / "resolved_config.json", cfg.to_json().dump(2) + "\n");
  write_records(fs::path(cfg.out) / "responses.jsonl", records);
  const std::size_t failed = count_errors(records, err);

  const auto responses = to_response_records(records);
  out << write_benchmark(cfg, responses, in.templates);
  const IndexCatalog catalog = load_or_build_index(cfg, in);
  const auto groups = group_by_target(responses);
  const bool targets_ok = all_targets_parse(groups, err);
  const BatchResult batch = batch_reconstruct(groups, in.templates, catalog, in.library, rc, cfg.jobs);
  out << write_reconstruction(cfg, batch);
  return failed == 0 && targets_ok ? kExitOk : kExitPartial;
}

}  // namespace

ordered_json RunConfig::to_json() const {
  return {{"version", kConfigVersion},
          {"library", library},
          {"templates", templates},
          {"instruction", instruction},
          {"index", index},
          {"task", task},
          {"plan", plan},
          {"k", k},
          {"n_syn", n_syn},
          {"seed", seed},
          {"out", out},
          {"jobs", jobs},
          {"backend",
           {{"kind", backend.kind},
            {"mock_dir", backend.mock_dir},
            {"url", backend.url},
            {"format", backend.format},
            {"model", backend.model},
            {"auth_token_env", backend.auth_token_env},
            {"timeout", backend.timeout},
            {"concurrency", backend.concurrency},
            {"max_tokens", backend.max_tokens}}}};
}

json load_config_file(const fs::path &path) {
  json doc = json::parse(read_text(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ConfigError(path.string() + " is not a JSON object");
  if (!doc.contains("version")) throw ConfigError(path.string() + ": missing version");
  if (doc["version"] != kConfigVersion)
    throw ConfigError(path.string() + ": unsupported config version " + doc["version"].dump());
  check_keys(doc, kTopKeys, path.string());
  if (doc.contains("backend")) {
    if (!doc["backend"].is_object()) throw ConfigError(path.string() + ": backend must be an object");
    check_keys(doc["backend"], kBackendKeys, path.string() + " backend");
  }
  const fs::path base = fs::absolute(path).parent_path();
  auto rebase = [&](json &node, const std::string &key) {
    if (node.contains(key) && node[key].is_string() && !node[key].get<std::string>().empty()) {
      const fs::path p = node[key].get<std::string>();
      if (p.is_relative()) node[key] = (base / p).lexically_normal().string();
    }
  };
  for (const std::string &key : kPathKeys) rebase(doc, key);
  if (doc.contains("backend")) rebase(doc["backend"], "mock_dir");
  return doc;
}

RunConfig resolve_config(const Overrides &f, const json &file) {
  const std::string data_dir = SYNTHKIT_DATA_DIR;
  RunConfig c;
  c.library = pick(f.library, file, "library", data_dir + "/building_blocks.smi");
  c.templates = pick(f.templates, file, "templates", data_dir + "/templates/rxn_set_2.tsv");
  c.instruction = pick(f.instruction, file, "instruction", data_dir + "/instruction.txt");
  c.index = pick(f.index, file, "index", std::string());
  c.task = pick(f.task, file, "task", c.task);
  const TaskDefaults &task = task_defaults(c.task);
  c.plan = pick(f.plan, file, "plan", task.plan);
  sampling_plan(c.plan);
  c.k = pick(f.k, file, "k", task.k);
  c.n_syn = pick(f.n_syn, file, "n_syn", task.n_syn);
  c.seed = pick(f.seed, file, "seed", c.seed);
  c.out = pick(f.out, file, "out", c.out);
  c.jobs = pick(f.jobs, file, "jobs", c.jobs);

  const json backend = file.contains("backend") ? file["backend"] : json::object();
  BackendConfig &b = c.backend;
  b.kind = pick(f.backend_kind, backend, "kind", b.kind);
  b.mock_dir = pick(f.mock_dir, backend, "mock_dir", b.mock_dir);
  b.url = pick(f.url, backend, "url", b.url);
  b.format = pick(f.format, backend, "format", b.format);
  b.model = pick(f.model, backend, "model", b.model);
  b.auth_token_env = pick(std::optional<std::string>(), backend, "auth_token_env", b.auth_token_env);
  b.timeout = pick(f.timeout, backend, "timeout", b.timeout);
  b.concurrency = pick(f.concurrency, backend, "concurrency", b.concurrency);
  b.max_tokens = pick(f.max_tokens, backend, "max_tokens", b.max_tokens);

  if (c.k < 1 || c.n_syn < 1) throw ConfigError("k and n_syn must be at least 1");
  if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (b.concurrency < 1) throw ConfigError("concurrency must be at least 1");
  if (b.max_tokens < 1) throw ConfigError("max_tokens must be at least 1");
  if (b.timeout <= 0) throw ConfigError("timeout must be positive");
  return c;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"synthkit: synthesis-route data generation, validation and reconstruction", "synthkit"};
  app.fallthrough();
  app.require_subcommand(1);

  Overrides f;
  std::string config_path;
  app.add_option("--config", config_path, "Versioned JSON run configuration");
  app.add_option("--seed", f.seed, "Master random seed");
  app.add_option("--library", f.library, "Building-block library (.smi)");
  app.add_option("--templates", f.templates, "Reaction templates (.tsv)");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--jobs", f.jobs, "Worker threads");

  auto add_task_options = [&f](CLI::App *sub) {
    sub->add_option("--task", f.task, "llm-benchmark | synthesis-planning | synthesizable-analog | hit-expansion");
    sub->add_option("--plan", f.plan, "Sampling plan");
  };
  auto add_reconstruction_options = [&f](CLI::App *sub) {
    sub->add_option("--k", f.k, "Neighbors per retriever");
    sub->add_option("--n-syn", f.n_syn, "Partial routes kept per step");
    sub->add_option("--index", f.index, "Prebuilt index directory");
  };
  auto add_backend_options = [&f](CLI::App *sub) {
    sub->add_option("--instruction", f.instruction, "Instruction text file");
    sub->add_option("--backend", f.backend_kind, "mock | http");
    sub->add_option("--mock-dir", f.mock_dir, "Canned-response directory for the mock backend");
    sub->add_option("--url", f.url, "Endpoint URL for the http backend");
    sub->add_option("--format", f.format, "native | openai-completions | openai-chat");
    sub->add_option("--model", f.model, "Model name sent to OpenAI-style endpoints");
    sub->add_option("--timeout", f.timeout, "Request timeout in seconds");
    sub->add_option("--concurrency", f.concurrency, "Requests in flight");
    sub->add_option("--max-tokens", f.max_tokens, "Generation length limit");
  };

  std::size_t n = 100;
  std::string shape = "linear";
  bool unique = false;
  std::string emit_mock;
  CLI::App *gen = app.add_subcommand("gen-data", "Sample synthesis routes into a prompt-response corpus");
  gen->add_option("--n", n, "Number of routes")->capture_default_str();
  gen->add_option("--shape", shape, "linear | branching")->capture_default_str();
  gen->add_flag("--unique-targets", unique, "Skip repeated final products");
  gen->add_option("--instruction", f.instruction, "Instruction text file");
  gen->add_option("--emit-mock", emit_mock, "Also store each route as canned mock responses for --plan");
  add_task_options(gen);

  CLI::App *index = app.add_subcommand("build-index", "Build one retrieval index per (template, slot)");
  index->add_option("--index", f.index, "Index directory (default <out>/index)");

  std::string responses;
  CLI::App *validate = app.add_subcommand("validate", "Score responses on the six benchmark metrics");
  validate->add_option("--responses", responses, "Response JSON lines")->required();

  std::string targets;
  bool latency = false;
  CLI::App *infer = app.add_subcommand("infer", "Run a sampling plan against a generation backend");
  infer->add_option("--targets", targets, "Targets, one per line")->required();
  infer->add_flag("--latency", latency, "Record per-request latency");
  add_task_options(infer);
  add_backend_options(infer);

  CLI::App *recon = app.add_subcommand("reconstruct", "Reconstruct routes from responses against the library");
  recon->add_option("--responses", responses, "Response JSON lines")->required();
  add_task_options(recon);
  add_reconstruction_options(recon);

  bool dry_run = false;
  CLI::App *pipe = app.add_subcommand("pipeline", "infer, validate and reconstruct in one run");
  pipe->add_option("--targets", targets, "Targets, one per line")->required();
  pipe->add_flag("--dry-run", dry_run, "Print the resolved configuration and plan only");
  add_task_options(pipe);
  add_reconstruction_options(pipe);
  add_backend_options(pipe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  g_interrupted = false;
  auto previous_int = std::signal(SIGINT, on_signal);
  auto previous_term = std::signal(SIGTERM, on_signal);
  struct Restore {
    decltype(previous_int) a, b;
    ~Restore() {
      std::signal(SIGINT, a);
      std::signal(SIGTERM, b);
    }
  } restore{previous_int, previous_term};

  RunConfig cfg;
  try {
    const json file = config_path.empty() ? json::object() : load_config_file(config_path);
    cfg = resolve_config(f, file);
    int code = kExitOk;
    if (*gen) {
      code = cmd_gen_data(cfg, n, shape, unique, emit_mock, out);
    } else if (*index) {
      code = cmd_build_index(cfg, out, err);
    } else if (*validate) {
      code = cmd_validate(cfg, responses, out);
    } else if (*infer) {
      code = cmd_infer(cfg, targets, latency, out, err);
    } else if (*recon) {
      code = cmd_reconstruct(cfg, responses, out, err);
    } else if (*pipe) {
      code = cmd_pipeline(cfg, targets, dry_run, out, err);
    }
    if (g_interrupted) {
      err << "interrupted; partial results written\n";
      return kExitPartial;
    }
    return code;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
  } catch (const fs::filesystem_error &e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace synthkit::cli
