// Copyright 2026 dqtraj contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dqtraj/common.hpp"

namespace dqt {

/// Raised on malformed or incomplete configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Flat `section.key = value` configuration. Values are plain scalars or
/// inline JSON (used for matrices and lists). '#' starts a comment.
class Config {
 public:
  Config() = default;
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::optional<std::uint64_t> get_u64_opt(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;

  /// Positive-count guard: budgets and counts must be > 0.
  std::int64_t get_count(const std::string& key, std::int64_t fallback) const;
  /// Tolerance guard: must lie in (0, 1).
  double get_tolerance(const std::string& key, double fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// FNV-1a hash of the canonical "key = value" listing; recorded in every
  /// emitted record for provenance.
  std::string hash() const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace dqt
