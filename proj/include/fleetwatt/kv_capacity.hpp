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

#include <cmath>
#include <cstdint>

#include "fleetwatt/error.hpp"
#include "fleetwatt/model.hpp"
#include "fleetwatt/power.hpp"

namespace fleetwatt {

inline constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;

/// Per-GPU KV layout: bytes per cached token and the VRAM left for KV.
struct KvGeometry {
  double kappa = 0.0;    // bytes/token per GPU
  double kv_vram = 0.0;  // bytes per GPU after weights and reserve
  KvSharding sharding = KvSharding::kTpSharded;

  /// Tokens of KV the whole TP group can hold (each GPU holds its shard of
  /// every token, so the group budget equals the per-GPU budget).
  std::int64_t token_budget() const {
    return static_cast<std::int64_t>(std::floor(kv_vram / kappa));
  }
};

inline int kv_heads_per_gpu(const ModelSpec& model, KvSharding sharding) {
  if (sharding == KvSharding::kReplicated) return model.kv_heads;
  return (model.kv_heads + model.tp - 1) / model.tp;
}

/// KV-cache bytes per token stored on one GPU: 2 (K and V) * layers *
/// heads_per_gpu * head_dim * element width.
inline double kappa_per_gpu(const ModelSpec& model, KvSharding sharding) {
  model.validate();
  return 2.0 * model.layers * kv_heads_per_gpu(model, sharding) * model.head_dim *
         model.kv_bytes_per_elem;
}

/// VRAM available for KV on one GPU; negative when weights plus reserve do not fit.
inline double usable_kv_bytes(const GpuSpec& gpu, const ModelSpec& model,
                              double reserve_bytes) {
  return gpu.vram_bytes() - model.weight_bytes() / model.tp - reserve_bytes;
}

/// Concurrency ceiling at a context window: floor(budget / window).
inline std::int64_t n_max(std::int64_t kv_token_budget, std::int64_t ctx_window) {
  if (ctx_window < 1) throw DomainError("n_max: context window must be >= 1");
  if (kv_token_budget <= 0) return 0;
  return kv_token_budget / ctx_window;
}

/// Cross-generation budget scaling; rounds to the nearest token.
inline std::int64_t scale_budget(std::int64_t base_budget, double vram_ratio) {
  if (!(vram_ratio > 0.0)) throw DomainError("scale_budget: ratio must be > 0");
  return static_cast<std::int64_t>(std::llround(static_cast<double>(base_budget) * vram_ratio));
}

}  // namespace fleetwatt
