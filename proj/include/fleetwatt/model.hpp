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

#include <optional>
#include <string>
#include <string_view>

#include "fleetwatt/error.hpp"

namespace fleetwatt {

/// Transformer architecture fields that drive weight streaming and KV size.
struct ModelSpec {
  std::string name;
  double total_params = 0.0;
  std::optional<double> active_params;  // MoE only
  int layers = 0;
  int kv_heads = 0;
  int head_dim = 0;
  double bytes_per_param = 2.0;  // 2 fp16, 1 fp8, 0.5 int4
  double kv_bytes_per_elem = 2.0;  // KV dtype is independent of weight dtype
  int tp = 1;

  bool is_moe() const { return active_params.has_value(); }

  /// Parameters touched per decode iteration.
  double streamed_params() const { return active_params.value_or(total_params); }

  double weight_bytes() const { return total_params * bytes_per_param; }

  void validate() const {
    if (name.empty()) throw DomainError("model spec requires a name");
    if (!(total_params > 0.0)) throw DomainError("model '" + name + "': total_params must be > 0");
    if (active_params && !(*active_params > 0.0 && *active_params <= total_params)) {
      throw DomainError("model '" + name + "': active_params must be in (0, total_params]");
    }
    if (layers < 1 || kv_heads < 1 || head_dim < 1 || tp < 1) {
      throw DomainError("model '" + name + "': layers, kv_heads, head_dim, tp must be >= 1");
    }
    if (!(bytes_per_param > 0.0) || !(kv_bytes_per_elem > 0.0)) {
      throw DomainError("model '" + name + "': element widths must be > 0");
    }
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// How KV heads are laid out across a tensor-parallel group.
enum class KvSharding {
  kTpSharded,   // ceil(kv_heads / tp) heads per GPU
  kReplicated,  // every GPU holds all kv_heads
};

inline std::string_view to_string(KvSharding s) {
  return s == KvSharding::kTpSharded ? "tp_sharded" : "replicated";
}

inline KvSharding parse_kv_sharding(std::string_view s) {
  if (s == "tp_sharded") return KvSharding::kTpSharded;
  if (s == "replicated") return KvSharding::kReplicated;
  throw DomainError("unknown kv sharding '" + std::string(s) + "'");
}

}  // namespace fleetwatt
