// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

namespace synthkit::cli {

inline constexpr int kConfigVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

struct BackendConfig {
  std::string kind = "mock";  // mock | http
  std::string mock_dir;
  std::string url;
  std::string format = "native";
  std::string model;
  std::string auth_token_env = "SYNTHKIT_API_TOKEN";
  double timeout = 120.0;
  int concurrency = 4;
  int max_tokens = 2048;
};

struct RunConfig {
  std::string library;
  std::string templates;
  std::string instruction;
  std::string index;  // prebuilt index directory; empty builds in memory
  std::string task = "synthesis-planning";
  std::string plan;
  int k = 0;
  int n_syn = 0;
  std::uint64_t seed = 0;
  std::string out = "synthkit-out";
  int jobs = 1;
  BackendConfig backend;

  nlohmann::ordered_json to_json() const;
};

/// Values given on the command line; unset fields fall through.
struct Overrides {
  std::optional<std::string> library, templates, instruction, index, task, plan, out;
  std::optional<int> k, n_syn, jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend_kind, mock_dir, url, format, model;
  std::optional<double> timeout;
  std::optional<int> concurrency, max_tokens;
};

/// Reads a versioned config document. Relative paths are taken relative to
/// the file's directory. Throws ConfigError or IoError.
nlohmann::json load_config_file(const std::filesystem::path &path);

/// Flags, then the config document, then the task's defaults, then built-ins.
/// Throws ConfigError or UnknownPlan.
RunConfig resolve_config(const Overrides &flags, const nlohmann::json &file = nlohmann::json::object());

/// Entry point shared by the executable and the tests.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace synthkit::cli
