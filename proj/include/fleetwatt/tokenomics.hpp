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
#include <optional>
#include <string>
#include <vector>

#include "fleetwatt/error.hpp"
#include "fleetwatt/perf_model.hpp"
#include "fleetwatt/power.hpp"

namespace fleetwatt {

/// One single-GPU operating point. tok_per_watt is output tokens per joule.
struct OperatingPoint {
  std::string profile;
  std::int64_t ctx_window = 0;
  std::int64_t n_max = 0;
  double n_active = 0.0;
  double l_mean = 0.0;
  double throughput = 0.0;  // tok/s
  double power = 0.0;       // W
  double tok_per_watt = 0.0;
  Quality quality = Quality::kFair;
  WQuality w_quality = WQuality::kMeasured;
};

inline OperatingPoint gpu_tok_per_watt(const GpuProfile& profile, std::int64_t ctx_window,
                                       double n_active, double l_mean) {
  if (ctx_window < 1) throw DomainError("gpu_tok_per_watt: context window must be >= 1");
  if (std::isnan(n_active) || n_active < 0.0) {
    throw DomainError("gpu_tok_per_watt: n_active must be >= 0");
  }
  if (!(l_mean > 0.0) || l_mean > static_cast<double>(ctx_window)) {
    throw DomainError("gpu_tok_per_watt: l_mean must be in (0, ctx_window]");
  }
  const std::int64_t cap = profile.n_max(ctx_window);
  if (n_active > static_cast<double>(cap)) throw CapacityExceeded(n_active, cap);

  OperatingPoint op;
  op.profile = profile.name;
  op.ctx_window = ctx_window;
  op.n_max = cap;
  op.n_active = n_active;
  op.l_mean = l_mean;
  op.throughput = decode_throughput(profile, n_active, l_mean);
  op.power = power_at(profile.power, n_active);
  op.tok_per_watt = op.throughput / op.power;
  op.quality = profile.power_quality();
  op.w_quality = profile.w_quality;
  return op;
}

/// Full-concurrency sweep: n = n_max(ctx), in-flight sequences at the window.
inline std::vector<OperatingPoint> context_sweep(const GpuProfile& profile,
                                                 const std::vector<std::int64_t>& ctx_windows) {
  if (ctx_windows.empty()) throw DomainError("context_sweep: empty window list");
  std::vector<OperatingPoint> rows;
  rows.reserve(ctx_windows.size());
  for (std::int64_t ctx : ctx_windows) {
    rows.push_back(gpu_tok_per_watt(profile, ctx, static_cast<double>(profile.n_max(ctx)),
                                    static_cast<double>(ctx)));
  }
  return rows;
}

/// tok/W ratio across each doubling of the context window.
inline std::vector<double> halving_ratios(const std::vector<OperatingPoint>& sweep) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
    if (sweep[i + 1].ctx_window != 2 * sweep[i].ctx_window) {
      throw DomainError("halving_ratios: windows must form a doubling ladder");
    }
    if (!(sweep[i].tok_per_watt > 0.0)) {
      throw DomainError("halving_ratios: zero tok/W at window " +
                        std::to_string(sweep[i].ctx_window));
    }
    out.push_back(sweep[i + 1].tok_per_watt / sweep[i].tok_per_watt);
  }
  return out;
}

/// Operating point at utilization rho: n_active = floor(rho * n_max).
/// l_mean defaults to the window (sequences near capacity).
inline OperatingPoint utilization_point(const GpuProfile& profile, std::int64_t ctx_window,
                                        double rho, std::optional<double> l_mean = std::nullopt) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("utilization_point: rho must be in [0, 1]");
  const double n = std::floor(rho * static_cast<double>(profile.n_max(ctx_window)));
  return gpu_tok_per_watt(profile, ctx_window, n,
                          l_mean.value_or(static_cast<double>(ctx_window)));
}

/// Tokens per dollar at a sustained throughput (tok/s) and rental rate ($/hr).
inline double tok_per_dollar(double throughput, double cost_per_hour) {
  if (!(cost_per_hour > 0.0)) throw DomainError("tok_per_dollar: cost rate must be > 0");
  return throughput * 3600.0 / cost_per_hour;
}

inline double tok_per_dollar(const OperatingPoint& op, double cost_per_hour) {
  return tok_per_dollar(op.throughput, cost_per_hour);
}

struct ProfileSummary {
  std::string profile;
  std::string gpu;
  std::string model;
  Quality quality = Quality::kFair;
  double tdp_w = 0.0;
  double p_idle = 0.0;
  double w_ms = 0.0;
  WQuality w_quality = WQuality::kMeasured;
  OperatingPoint point;  // full concurrency at the comparison window
  double cost_per_hour = 0.0;
  std::optional<double> tok_per_dollar;  // absent when no cost rate is known
};

inline ProfileSummary summarize(const GpuProfile& p, std::int64_t ctx_window) {
  ProfileSummary s;
  s.profile = p.name;
  s.gpu = p.gpu.name;
  s.model = p.model.name;
  s.quality = p.power_quality();
  s.tdp_w = p.gpu.tdp_w;
  s.p_idle = p.power.p_idle;
  s.w_ms = p.w_ms;
  s.w_quality = p.w_quality;
  s.point = context_sweep(p, {ctx_window}).front();
  s.cost_per_hour = p.gpu.cost_per_hour;
  if (p.gpu.cost_per_hour > 0.0) s.tok_per_dollar = tok_per_dollar(s.point, p.gpu.cost_per_hour);
  return s;
}

struct GenerationComparison {
  std::int64_t ctx_window = 0;
  std::vector<ProfileSummary> rows;
  /// multiplier[i][j] = tok/W of row j over tok/W of row i.
  std::vector<std::vector<double>> multiplier;
};

inline GenerationComparison compare_generations(const std::vector<GpuProfile>& profiles,
                                                std::int64_t ctx_window) {
  if (profiles.size() < 2) throw DomainError("compare_generations: need at least two profiles");
  GenerationComparison cmp;
  cmp.ctx_window = ctx_window;
  for (const auto& p : profiles) cmp.rows.push_back(summarize(p, ctx_window));
  const std::size_t n = cmp.rows.size();
  cmp.multiplier.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double base = cmp.rows[i].point.tok_per_watt;
      cmp.multiplier[i][j] = base > 0.0 ? cmp.rows[j].point.tok_per_watt / base : 0.0;
    }
  }
  return cmp;
}

}  // namespace fleetwatt
