// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace synthkit {

struct SamplingSetting {
  double temperature = 0.1;
  double top_p = 0.1;
  int repeats = 1;

  bool operator==(const SamplingSetting &) const = default;
};

struct SamplingPlan {
  std::string name;
  std::vector<SamplingSetting> settings;

  /// Total number of inferences per target.
  int total() const;
};

/// frozen-only, low-only, medium-only, high-only, frugal, greedy.
const std::vector<std::string> &plan_names();

/// Throws UnknownPlan.
SamplingPlan sampling_plan(std::string_view name);

struct TaskDefaults {
  std::string task;
  std::string plan;
  int k = 5;
  int n_syn = 25;
};

/// llm-benchmark, synthesis-planning, synthesizable-analog, hit-expansion.
const std::vector<TaskDefaults> &task_table();

/// Throws ConfigError for an unknown task.
const TaskDefaults &task_defaults(std::string_view task);

/// Instruction, input and response sections. Throws TargetParseError for an
/// empty target.
std::string build_prompt(std::string_view target_smiles, std::string_view instruction);

inline constexpr int kDefaultMaxTokens = 2048;

struct InferenceRequest {
  std::string target_smiles;
  std::string prompt;
  double temperature = 0.1;
  double top_p = 0.1;
  int repeat = 0;  // index within the setting
  int max_tokens = kDefaultMaxTokens;
};

/// A text-generation endpoint. complete() must be safe to call concurrently.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  /// Raw completion text. Throws TransportError, BackendError or Timeout.
  virtual std::string complete(const InferenceRequest &request) = 0;
};

/// File name of the canned response for (target, T, TopP, repeat).
std::string mock_key(std::string_view target_smiles, double temperature, double top_p, int repeat);

/// Replays canned responses from a directory, one file per mock_key.
class MockBackend : public Backend {
 public:
  explicit MockBackend(std::filesystem::path dir);

  std::string id() const override { return "mock"; }
  /// Throws BackendError(404) when no response is stored for the request.
  std::string complete(const InferenceRequest &request) override;

  /// Stores a canned response. Throws IoError.
  static void store(const std::filesystem::path &dir, std::string_view target_smiles, double temperature,
                    double top_p, int repeat, std::string_view text);

 private:
  std::filesystem::path dir_;
};

enum class WireFormat {
  kNative,            // {prompt, temperature, top_p, max_tokens} -> {text}
  kOpenAiCompletion,  // /v1/completions style
  kOpenAiChat,        // /v1/chat/completions style
};

/// Throws ConfigError.
WireFormat parse_wire_format(std::string_view name);

struct HttpOptions {
  std::string url;  // http://host[:port]/path
  WireFormat format = WireFormat::kNative;
  std::string model;       // sent by the OpenAI-style formats
  std::string auth_token;  // bearer token, optional
  double timeout_seconds = 120.0;
};

class HttpBackend : public Backend {
 public:
  /// Throws ConfigError for a malformed or non-http URL.
  explicit HttpBackend(HttpOptions options);

  std::string id() const override;
  /// Retries once after a TransportError; never after a reply or a timeout.
  std::string complete(const InferenceRequest &request) override;

 private:
  HttpOptions options_;
  std::string host_;
  int port_ = 80;
  std::string path_;
};

/// Request body for the given wire format.
std::string encode_request(const InferenceRequest &request, WireFormat format, std::string_view model);
/// Completion text from a 200 reply. Throws BackendError(200, body) when malformed.
std::string decode_response(std::string_view body, WireFormat format);

struct InferenceRecord {
  std::string target_smiles;
  double temperature = 0.0;
  double top_p = 0.0;
  int repeat = 0;
  std::string backend;
  std::string response;
  std::string error;  // empty on success
  double latency_ms = 0.0;
};

struct RunOptions {
  int concurrency = 4;
  int max_tokens = kDefaultMaxTokens;
  /// When set and true, requests not yet started are recorded as cancelled.
  const std::atomic<bool> *cancel = nullptr;
};

/// Runs every plan setting for every target. Records come back target-major
/// in plan order whatever the completion order; failures are recorded, not thrown.
std::vector<InferenceRecord> run_task(const std::vector<std::string> &targets, const SamplingPlan &plan,
                                      Backend &backend, std::string_view instruction, const RunOptions &opts = {});

/// One JSON object per record. Latency is left out unless requested so that
/// runs against the mock compare byte for byte.
std::string record_to_jsonl(const InferenceRecord &record, bool include_latency = false);
void write_records(const std::filesystem::path &path, const std::vector<InferenceRecord> &records,
                   bool include_latency = false);

}  // namespace synthkit
