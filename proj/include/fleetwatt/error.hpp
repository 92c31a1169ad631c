// Copyright 2026 The FleetWatt Authors. All Rights Reserved.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fleetwatt {

/// Invalid numeric argument (negative concurrency, nonpositive bandwidth, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested concurrency exceeds the KV-cache ceiling of a profile.
class CapacityExceeded : public std::runtime_error {
 public:
  CapacityExceeded(double requested, long long n_max)
      : std::runtime_error("requested concurrency " + std::to_string(requested) +
                           " exceeds n_max " + std::to_string(n_max)),
        requested_(requested),
        n_max_(n_max) {}

  double requested() const { return requested_; }
  long long n_max() const { return n_max_; }

 private:
  double requested_;
  long long n_max_;
};

/// Model weights do not fit in device memory.
class InfeasibleModel : public std::runtime_error {
 public:
  InfeasibleModel(const std::string& what, double deficit_bytes)
      : std::runtime_error(what), deficit_bytes_(deficit_bytes) {}

  /// Bytes by which weights (plus reserve) exceed VRAM.
  double deficit_bytes() const { return deficit_bytes_; }

 private:
  double deficit_bytes_;
};

class IngestionError : public std::runtime_error {
 public:
  IngestionError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A pool cannot meet its SLO (or cannot hold a single sequence).
class SizingError : public std::runtime_error {
 public:
  SizingError(const std::string& pool_label, const std::string& reason)
      : std::runtime_error("pool '" + pool_label + "': " + reason),
        pool_label_(pool_label) {}

  const std::string& pool_label() const { return pool_label_; }

 private:
  std::string pool_label_;
};

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fleetwatt
