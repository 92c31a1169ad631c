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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fleetwatt/error.hpp"
#include "fleetwatt/kv_capacity.hpp"
#include "fleetwatt/model.hpp"
#include "fleetwatt/power.hpp"

namespace fleetwatt {

enum class ProfileKind { kManual, kComputed };

/// MEASURED for dense streaming; LOWER_BOUND when W counts only MoE active
/// parameters (expert dispatch is not modeled).
enum class WQuality { kMeasured, kLowerBound };

inline std::string_view to_string(ProfileKind k) {
  return k == ProfileKind::kManual ? "manual" : "computed";
}
inline std::string_view to_string(WQuality q) {
  return q == WQuality::kMeasured ? "MEASURED" : "LOWER_BOUND";
}

inline constexpr std::int64_t kDefaultCalibContext = 8192;
inline constexpr double kDefaultVramReserveGiB = 4.0;

struct WeightStream {
  double ms = 0.0;
  WQuality quality = WQuality::kMeasured;
};

/// Per-iteration time to stream the (active) weights of one TP shard.
inline WeightStream weight_stream_time(const ModelSpec& model, const GpuSpec& gpu,
                                       double bw_efficiency) {
  model.validate();
  if (!(bw_efficiency > 0.0 && bw_efficiency <= 1.0)) {
    throw DomainError("weight_stream_time: bandwidth efficiency must be in (0, 1]");
  }
  if (!(gpu.mem_bw_bytes_per_s > 0.0)) {
    throw DomainError("weight_stream_time: zero memory bandwidth");
  }
  const double bytes = model.streamed_params() * model.bytes_per_param;
  const double seconds = bytes / (model.tp * gpu.mem_bw_bytes_per_s * bw_efficiency);
  return {seconds * 1e3, model.is_moe() ? WQuality::kLowerBound : WQuality::kMeasured};
}

/// H(L) = H0 * L / L_calib.
inline double kv_scan_overhead(double h0_ms, double l_calib, double l_mean) {
  if (!(h0_ms > 0.0) || !(l_calib > 0.0) || !(l_mean > 0.0)) {
    throw DomainError("kv_scan_overhead: inputs must be > 0");
  }
  return h0_ms * l_mean / l_calib;
}

/// The serving operating surface of one (GPU, model) TP group.
struct GpuProfile {
  std::string name;
  GpuSpec gpu;
  ModelSpec model;
  PowerCurve power;  // effective curve; x0 may differ from the catalog entry
  double w_ms = 0.0;
  double h0_ms = 0.0;
  std::int64_t l_calib = kDefaultCalibContext;
  std::int64_t kv_token_budget = 0;
  std::int64_t nmax_floor = 0;  // 1 when an infeasible model is explicitly clamped
  ProfileKind kind = ProfileKind::kManual;
  WQuality w_quality = WQuality::kMeasured;

  // Computed-profile inputs, kept for reproducibility and reports.
  double bw_efficiency = 0.0;
  double vram_reserve_bytes = 0.0;
  KvSharding sharding = KvSharding::kTpSharded;
  double dispatch_ms = 0.0;

  Quality power_quality() const { return gpu.quality; }

  std::int64_t n_max(std::int64_t ctx_window) const {
    return std::max(nmax_floor, fleetwatt::n_max(kv_token_budget, ctx_window));
  }

  friend bool operator==(const GpuProfile&, const GpuProfile&) = default;
};

/// tau(n, L) = W + H(L) * n, in milliseconds.
inline double decode_iteration_latency(const GpuProfile& p, double n, double l_mean) {
  if (std::isnan(n) || n < 0.0) throw DomainError("decode_iteration_latency: n must be >= 0");
  if (n == 0.0) return p.w_ms;
  return p.w_ms + kv_scan_overhead(p.h0_ms, static_cast<double>(p.l_calib), l_mean) * n;
}

/// Decode tokens per second at concurrency n: n / tau.
inline double decode_throughput(const GpuProfile& p, double n, double l_mean) {
  if (n == 0.0) return 0.0;
  return n / (decode_iteration_latency(p, n, l_mean) * 1e-3);
}

/// Calibrated profile with explicitly supplied constants.
inline GpuProfile build_manual_profile(const GpuSpec& gpu, const ModelSpec& model,
                                       double w_ms, double h0_ms, std::int64_t l_calib,
                                       std::int64_t kv_token_budget,
                                       WQuality w_quality = WQuality::kMeasured) {
  if (!(w_ms > 0.0) || !(h0_ms > 0.0) || l_calib < 1 || kv_token_budget < 0) {
    throw DomainError("build_manual_profile: W, H0, L_calib must be > 0 and budget >= 0");
  }
  GpuProfile p;
  p.name = gpu.name + "/" + model.name + "@manual";
  p.gpu = gpu;
  p.model = model;
  p.power = gpu.power;
  p.w_ms = w_ms;
  p.h0_ms = h0_ms;
  p.l_calib = l_calib;
  p.kv_token_budget = kv_token_budget;
  p.kind = ProfileKind::kManual;
  p.w_quality = w_quality;
  p.bw_efficiency = gpu.bw_efficiency;
  return p;
}

struct ComputedProfileOptions {
  std::optional<double> bw_efficiency;  // defaults to the GPU's catalog value
  double vram_reserve_gib = kDefaultVramReserveGiB;
  KvSharding sharding = KvSharding::kTpSharded;
  double dispatch_ms = 0.0;  // additive MoE all-to-all cost
  std::int64_t l_calib = kDefaultCalibContext;
  bool clamp_infeasible = false;  // floor n_max at 1 instead of throwing
};

/// First-principles profile from hardware and architecture alone.
inline GpuProfile build_computed_profile(const GpuSpec& gpu, const ModelSpec& model,
                                         const ComputedProfileOptions& opt = {}) {
  gpu.validate();
  model.validate();
  if (!(opt.vram_reserve_gib >= 0.0)) throw DomainError("vram reserve must be >= 0");
  if (!(opt.dispatch_ms >= 0.0)) throw DomainError("dispatch_ms must be >= 0");
  if (opt.l_calib < 1) throw DomainError("l_calib must be >= 1");
  const double eff = opt.bw_efficiency.value_or(gpu.bw_efficiency);
  const WeightStream ws = weight_stream_time(model, gpu, eff);

  GpuProfile p;
  p.name = gpu.name + "/" + model.name + "@computed";
  p.gpu = gpu;
  p.model = model;
  p.kind = ProfileKind::kComputed;
  p.w_ms = ws.ms + opt.dispatch_ms;
  p.w_quality = ws.quality;
  p.l_calib = opt.l_calib;
  p.bw_efficiency = eff;
  p.vram_reserve_bytes = opt.vram_reserve_gib * kGiB;
  p.sharding = opt.sharding;
  p.dispatch_ms = opt.dispatch_ms;

  const double weights_per_gpu = model.weight_bytes() / model.tp;
  const double kappa = kappa_per_gpu(model, opt.sharding);
  if (weights_per_gpu > gpu.vram_bytes()) {
    if (!opt.clamp_infeasible) {
      throw InfeasibleModel("model '" + model.name + "' needs " +
                                std::to_string(weights_per_gpu / 1e9) + " GB/GPU of weights; '" +
                                gpu.name + "' has " + std::to_string(gpu.vram_gb) + " GB",
                            weights_per_gpu + p.vram_reserve_bytes - gpu.vram_bytes());
    }
    p.kv_token_budget = 0;
    p.nmax_floor = 1;
  } else {
    const KvGeometry geo{kappa, std::max(0.0, usable_kv_bytes(gpu, model, p.vram_reserve_bytes)),
                         opt.sharding};
    p.kv_token_budget = geo.token_budget();
  }
  p.h0_ms = kappa * static_cast<double>(opt.l_calib) /
            (gpu.mem_bw_bytes_per_s * eff) * 1e3;

  p.power = gpu.power;
  // Measured curves keep their fitted half-saturation point.
  if (gpu.quality == Quality::kFair) p.power.x0 = derive_x0(p.w_ms, p.h0_ms);
  return p;
}

/// Manual profile fitted to one observed full-concurrency operating point
/// (n_max sequences at ctx_window drawing p_sat watts at tok_per_watt).
/// Solves H0 from tau = n / (tok/W * P) and x0 from the logistic.
inline GpuProfile calibrate_profile(const GpuSpec& gpu, const ModelSpec& model, double w_ms,
                                    std::int64_t ctx_window, std::int64_t n_max_at_ctx,
                                    double p_sat, double tok_per_watt,
                                    std::int64_t l_calib = kDefaultCalibContext) {
  if (ctx_window < 1 || n_max_at_ctx < 1 || !(tok_per_watt > 0.0) || !(w_ms > 0.0)) {
    throw DomainError("calibrate_profile: window, n_max, W and tok/W must be positive");
  }
  const PowerCurve& c = gpu.power;
  if (!(p_sat > c.p_idle && p_sat < c.p_nom())) {
    throw DomainError("calibrate_profile: P_sat must lie strictly inside the power curve range");
  }
  const double n = static_cast<double>(n_max_at_ctx);
  const double tau_ms = n / (tok_per_watt * p_sat) * 1e3;
  const double h_ms = (tau_ms - w_ms) / n;
  if (!(h_ms > 0.0)) throw DomainError("calibrate_profile: operating point implies tau <= W");
  const double h0 = h_ms * static_cast<double>(l_calib) / static_cast<double>(ctx_window);

  GpuProfile p = build_manual_profile(gpu, model, w_ms, h0, l_calib, n_max_at_ctx * ctx_window);
  p.name = gpu.name + "/" + model.name + "@calibrated";
  p.power.x0 = std::log2(n) + std::log(c.p_range / (p_sat - c.p_idle) - 1.0) / c.k;
  p.w_quality = model.is_moe() ? WQuality::kLowerBound : WQuality::kMeasured;
  return p;
}

}  // namespace fleetwatt
