// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace synthkit {

/// Base class for every exception thrown by synthkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed SMILES / SMARTS text: unbalanced branches or rings, unknown tokens.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string &what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Chemically impossible valence, or an aromatic system with no Kekule form.
class ValenceError : public Error {
 public:
  using Error::Error;
};

/// A SMARTS construct outside the supported subset.
class UnsupportedFeature : public Error {
 public:
  UnsupportedFeature(const std::string &token)
      : Error("unsupported SMARTS feature: " + token), token_(token) {}

  const std::string &token() const noexcept { return token_; }

 private:
  std::string token_;
};

/// A product atom map with no source in the reactant patterns.
class MapClosureError : public Error {
 public:
  using Error::Error;
};

class SlotCountMismatch : public Error {
 public:
  using Error::Error;
};

class WidthMismatch : public Error {
 public:
  using Error::Error;
};

class EmptySlot : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class NoViableStart : public Error {
 public:
  using Error::Error;
};

class NoBranchingFound : public Error {
 public:
  using Error::Error;
};

class TargetParseError : public Error {
 public:
  using Error::Error;
};

class UnknownPlan : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Connection-level failure talking to a generation endpoint.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// The endpoint answered, but not with a usable completion.
class BackendError : public Error {
 public:
  BackendError(int status, std::string body)
      : Error("backend returned status " + std::to_string(status)), status_(status), body_(std::move(body)) {}

  int status() const noexcept { return status_; }
  const std::string &body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class Timeout : public Error {
 public:
  using Error::Error;
};

}  // namespace synthkit
