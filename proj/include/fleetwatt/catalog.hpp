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
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fleetwatt/error.hpp"
#include "fleetwatt/kv_capacity.hpp"
#include "fleetwatt/model.hpp"
#include "fleetwatt/perf_model.hpp"
#include "fleetwatt/power.hpp"

namespace fleetwatt {

/// GPUs, models and named manual profiles. User entries merge over the
/// built-in ones by name.
struct Catalog {
  std::vector<GpuSpec> gpus;
  std::vector<ModelSpec> models;
  std::vector<GpuProfile> profiles;

  const GpuSpec& gpu(std::string_view name) const { return find(gpus, name, "GPU"); }
  const ModelSpec& model(std::string_view name) const { return find(models, name, "model"); }
  const GpuProfile& profile(std::string_view name) const { return find(profiles, name, "profile"); }

  bool has_profile(std::string_view name) const {
    return std::any_of(profiles.begin(), profiles.end(),
                       [&](const GpuProfile& p) { return p.name == name; });
  }

  void upsert(const GpuSpec& g) { put(gpus, g); }
  void upsert(const ModelSpec& m) { put(models, m); }
  void upsert(const GpuProfile& p) { put(profiles, p); }

  void merge(const Catalog& other) {
    for (const auto& g : other.gpus) upsert(g);
    for (const auto& m : other.models) upsert(m);
    for (const auto& p : other.profiles) upsert(p);
  }

  friend bool operator==(const Catalog&, const Catalog&) = default;

 private:
  template <class T>
  static const T& find(const std::vector<T>& v, std::string_view name, const char* what) {
    auto it = std::find_if(v.begin(), v.end(), [&](const T& x) { return x.name == name; });
    if (it == v.end()) throw ConfigError(std::string("unknown ") + what + " '" + std::string(name) + "'");
    return *it;
  }
  template <class T>
  static void put(std::vector<T>& v, const T& x) {
    auto it = std::find_if(v.begin(), v.end(), [&](const T& y) { return y.name == x.name; });
    if (it == v.end()) {
      v.push_back(x);
    } else {
      *it = x;
    }
  }
};

namespace catalog {

inline constexpr double kH100BwEfficiency = 0.777;
inline constexpr double kB200BwEfficiency = 0.74;

inline GpuSpec h100_sxm5() {
  return {"H100-SXM5", 700.0, 80.0, 3.35e12, {300.0, 300.0, 1.0, 4.2}, 32.2, Quality::kHigh,
          kH100BwEfficiency};
}
inline GpuSpec h200_sxm() {
  return {"H200-SXM", 700.0, 141.0, 4.8e12, {300.0, 300.0, 1.0, 5.5}, 48.0, Quality::kFair,
          kH100BwEfficiency};
}
inline GpuSpec b200_sxm() {
  return {"B200-SXM", 1000.0, 180.0, 8.0e12, {430.0, 430.0, 1.0, 6.8}, 64.0, Quality::kFair,
          kB200BwEfficiency};
}
inline GpuSpec gb200_nvl() {
  return {"GB200-NVL", 1200.0, 200.0, 8.0e12, {516.0, 516.0, 1.0, 6.8}, 80.0, Quality::kFair,
          kB200BwEfficiency};
}

inline ModelSpec llama31_8b() { return {"Llama-3.1-8B", 8e9, std::nullopt, 32, 8, 128, 2.0, 2.0, 1}; }
inline ModelSpec llama31_70b() { return {"Llama-3.1-70B", 70e9, std::nullopt, 80, 8, 128, 2.0, 2.0, 8}; }
inline ModelSpec llama31_405b() {
  return {"Llama-3.1-405B", 405e9, std::nullopt, 126, 8, 128, 2.0, 2.0, 8};
}
inline ModelSpec qwen3_235b_a22b() { return {"Qwen3-235B-A22B", 235e9, 22e9, 94, 4, 128, 2.0, 2.0, 8}; }
// MLA caches one 576-wide latent per token per layer; expressed here as a
// single KV "head" of width 288 so that 2 * heads * head_dim = 576.
inline ModelSpec deepseek_v3() { return {"DeepSeek-V3", 671e9, 37e9, 61, 1, 288, 1.0, 2.0, 8}; }

inline constexpr std::int64_t kH100CalibratedBudget = 1048576;  // 128 sequences at 8K
inline constexpr double kB200BudgetRatio = 2.62;

/// Llama-3.1-70B TP=8 on H100, calibrated to measured serving behaviour.
inline GpuProfile h100_70b_calibrated() {
  GpuProfile p = build_manual_profile(h100_sxm5(), llama31_70b(), 6.72, 0.1390,
                                      kDefaultCalibContext, kH100CalibratedBudget);
  p.name = "H100-70B-calibrated";
  return p;
}

/// B200 projection scaled from the H100 profile by the KV-budget ratio, with
/// H0 and x0 fitted to the projected context sweep.
inline GpuProfile b200_70b_scaled() {
  GpuProfile p = build_manual_profile(b200_sxm(), llama31_70b(), 2.95, 0.0670,
                                      kDefaultCalibContext,
                                      scale_budget(kH100CalibratedBudget, kB200BudgetRatio));
  p.power.x0 = 4.461;
  p.name = "B200-70B-scaled";
  return p;
}

inline Catalog builtin() {
  Catalog c;
  c.gpus = {h100_sxm5(), h200_sxm(), b200_sxm(), gb200_nvl()};
  c.models = {llama31_8b(), llama31_70b(), llama31_405b(), qwen3_235b_a22b(), deepseek_v3()};
  c.profiles = {h100_70b_calibrated(), b200_70b_scaled()};
  return c;
}

}  // namespace catalog
}  // namespace fleetwatt
