// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/llm_client.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "synthkit/errors.hpp"
#include "synthkit/parallel.hpp"

namespace synthkit {

using nlohmann::json;

int SamplingPlan::total() const {
  int n = 0;
  for (const SamplingSetting &s : settings) n += s.repeats;
  return n;
}

namespace {

constexpr SamplingSetting kFrozen{0.1, 0.1, 1};
constexpr SamplingSetting kLow{0.6, 0.5, 1};
constexpr SamplingSetting kMedium{1.0, 0.7, 1};
constexpr SamplingSetting kHigh{1.5, 0.9, 1};

SamplingSetting times(SamplingSetting s, int repeats) {
  s.repeats = repeats;
  return s;
}

const std::vector<SamplingPlan> &plans() {
  static const std::vector<SamplingPlan> table = {
      {"frozen-only", {kFrozen}},
      {"low-only", {times(kLow, 5)}},
      {"medium-only", {times(kMedium, 5)}},
      {"high-only", {times(kHigh, 5)}},
      {"frugal", {kFrozen, kLow, kMedium, kHigh}},
      {"greedy", {kFrozen, times(kLow, 2), times(kMedium, 3), times(kHigh, 4)}},
  };
  return table;
}

}  // namespace

const std::vector<std::string> &plan_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const SamplingPlan &p : plans()) out.push_back(p.name);
    return out;
  }();
  return names;
}

SamplingPlan sampling_plan(std::string_view name) {
  for (const SamplingPlan &p : plans())
    if (p.name == name) return p;
  throw UnknownPlan("unknown sampling plan: " + std::string(name));
}

const std::vector<TaskDefaults> &task_table() {
  static const std::vector<TaskDefaults> table = {
      {"llm-benchmark", "frozen-only", 5, 25},
      {"synthesis-planning", "greedy", 5, 25},
      {"synthesizable-analog", "high-only", 10, 50},
      {"hit-expansion", "high-only", 20, 100},
  };
  return table;
}

const TaskDefaults &task_defaults(std::string_view task) {
  for (const TaskDefaults &t : task_table())
    if (t.task == task) return t;
  throw ConfigError("unknown task: " + std::string(task));
}

std::string build_prompt(std::string_view target_smiles, std::string_view instruction) {
  if (target_smiles.empty()) throw TargetParseError("empty target SMILES");
  std::string out = "### Instruction:\n";
  out += instruction;
  out += "\n\n### Input:\n";
  out += target_smiles;
  out += "\n\n### Response:\n";
  return out;
}

std::string mock_key(std::string_view target_smiles, double temperature, double top_p, int repeat) {
  char settings[64];
  std::snprintf(settings, sizeof settings, "\t%.4f\t%.4f\t%d", temperature, top_p, repeat);
  std::uint64_t h = 14695981039346656037ULL;  // FNV-1a
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(target_smiles);
  mix(settings);
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.txt", static_cast<unsigned long long>(h));
  return name;
}

MockBackend::MockBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string MockBackend::complete(const InferenceRequest &request) {
  const auto path = dir_ / mock_key(request.target_smiles, request.temperature, request.top_p, request.repeat);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError(404, "no canned response for " + request.target_smiles);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void MockBackend::store(const std::filesystem::path &dir, std::string_view target_smiles, double temperature,
                        double top_p, int repeat, std::string_view text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / mock_key(target_smiles, temperature, top_p, repeat);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

WireFormat parse_wire_format(std::string_view name) {
  if (name == "native") return WireFormat::kNative;
  if (name == "openai-completions") return WireFormat::kOpenAiCompletion;
  if (name == "openai-chat") return WireFormat::kOpenAiChat;
  throw ConfigError("unknown wire format: " + std::string(name));
}

std::string encode_request(const InferenceRequest &request, WireFormat format, std::string_view model) {
  json body;
  switch (format) {
    case WireFormat::kNative:
      body["prompt"] = request.prompt;
      break;
    case WireFormat::kOpenAiCompletion:
      body["model"] = model;
      body["prompt"] = request.prompt;
      break;
    case WireFormat::kOpenAiChat:
      body["model"] = model;
      body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
      break;
  }
  body["temperature"] = request.temperature;
  body["top_p"] = request.top_p;
  body["max_tokens"] = request.max_tokens;
  return body.dump();
}

std::string decode_response(std::string_view body, WireFormat format) {
  const json doc = json::parse(body, nullptr, false);
  const json *text = nullptr;
  if (doc.is_object()) {
    if (format == WireFormat::kNative) {
      if (doc.contains("text")) text = &doc["text"];
    } else if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
      const json &choice = doc["choices"][0];
      if (format == WireFormat::kOpenAiCompletion && choice.contains("text")) {
        text = &choice["text"];
      } else if (format == WireFormat::kOpenAiChat && choice.contains("message") &&
                 choice["message"].contains("content")) {
        text = &choice["message"]["content"];
      }
    }
  }
  if (!text || !text->is_string()) throw BackendError(200, std::string(body));
  return text->get<std::string>();
}

HttpBackend::HttpBackend(HttpOptions options) : options_(std::move(options)) {
  static const std::regex url(R"(^http://([^/:]+)(?::(\d{1,5}))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.url, m, url)) throw ConfigError("unsupported endpoint URL: " + options_.url);
  host_ = m[1];
  if (m[2].matched) port_ = std::stoi(m[2]);
  path_ = m[3].matched ? std::string(m[3]) : "/";
  if (options_.timeout_seconds <= 0) throw ConfigError("timeout must be positive");
}

std::string HttpBackend::id() const {
  switch (options_.format) {
    case WireFormat::kOpenAiCompletion:
      return "openai-completions:" + options_.url;
    case WireFormat::kOpenAiChat:
      return "openai-chat:" + options_.url;
    default:
      return "http:" + options_.url;
  }
}

std::string HttpBackend::complete(const InferenceRequest &request) {
  const std::string body = encode_request(request, options_.format, options_.model);
  httplib::Headers headers;
  if (!options_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + options_.auth_token);
  const auto timeout = std::chrono::duration<double>(options_.timeout_seconds);
  const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);

  for (int attempt = 0;; ++attempt) {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(timeout_us);
    client.set_read_timeout(timeout_us);
    client.set_write_timeout(timeout_us);
    const auto start = std::chrono::steady_clock::now();
    const httplib::Result res = client.Post(path_, headers, body, "application/json");
    if (res) {
      if (res->status != 200) throw BackendError(res->status, res->body);
      return decode_response(res->body, options_.format);
    }
    const httplib::Error err = res.error();
    // Refused connections also surface as ConnectionTimeout.
    const bool timed_out = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) &&
                           std::chrono::steady_clock::now() - start >= timeout * 0.95;
    if (timed_out) throw Timeout("request to " + options_.url + " timed out");
    if (attempt >= 1) throw TransportError(options_.url + ": " + httplib::to_string(err));
  }
}

std::vector<InferenceRecord> run_task(const std::vector<std::string> &targets, const SamplingPlan &plan,
                                      Backend &backend, std::string_view instruction, const RunOptions &opts) {
  std::vector<InferenceRecord> records;
  for (const std::string &target : targets)
    for (const SamplingSetting &s : plan.settings)
      for (int r = 0; r < s.repeats; ++r) {
        InferenceRecord rec;
        rec.target_smiles = target;
        rec.temperature = s.temperature;
        rec.top_p = s.top_p;
        rec.repeat = r;
        rec.backend = backend.id();
        records.push_back(std::move(rec));
      }

  parallel_for(records.size(), opts.concurrency, [&](std::size_t i) {
    InferenceRecord &rec = records[i];
    if (opts.cancel && opts.cancel->load()) {
      rec.error = "cancelled";
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      InferenceRequest req;
      req.target_smiles = rec.target_smiles;
      req.prompt = build_prompt(rec.target_smiles, instruction);
      req.temperature = rec.temperature;
      req.top_p = rec.top_p;
      req.repeat = rec.repeat;
      req.max_tokens = opts.max_tokens;
      rec.response = backend.complete(req);
    } catch (const BackendError &e) {
      rec.error = std::string(e.what()) + ": " + e.body();
    } catch (const Error &e) {
      rec.error = e.what();
    }
    rec.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });
  return records;
}

std::string record_to_jsonl(const InferenceRecord &record, bool include_latency) {
  json doc = {{"target_smiles", record.target_smiles},
              {"temperature", record.temperature},
              {"top_p", record.top_p},
              {"repeat", record.repeat},
              {"backend", record.backend},
              {"response", record.response},
              {"error", record.error}};
  if (include_latency) doc["latency_ms"] = record.latency_ms;
  return doc.dump();
}

void write_records(const std::filesystem::path &path, const std::vector<InferenceRecord> &records,
                   bool include_latency) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const InferenceRecord &r : records) out << record_to_jsonl(r, include_latency) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace synthkit
