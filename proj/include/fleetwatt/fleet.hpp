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
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fleetwatt/error.hpp"
#include "fleetwatt/perf_model.hpp"
#include "fleetwatt/power.hpp"
#include "fleetwatt/queueing.hpp"
#include "fleetwatt/workload.hpp"

namespace fleetwatt {

/// Latency objective: `percentile` of time-to-first-token at or below bound_ms.
/// TTFT is approximated by admission queue wait; prefill compute is excluded.
struct Slo {
  std::string metric = "TTFT";
  double percentile = 0.99;
  double bound_ms = 500.0;

  void validate() const {
    if (!(percentile > 0.0 && percentile < 1.0)) throw DomainError("SLO percentile must be in (0, 1)");
    if (!(bound_ms > 0.0)) throw DomainError("SLO bound must be > 0");
  }

  friend bool operator==(const Slo&, const Slo&) = default;
};

struct PoolConfig {
  GpuProfile profile;
  std::int64_t ctx_window = 0;
  ContextCdf cdf;
  double lam = 0.0;  // requests/s
  std::string label;

  void validate() const {
    if (ctx_window < 1) throw DomainError("pool '" + label + "': context window must be >= 1");
    if (!(lam >= 0.0)) throw DomainError("pool '" + label + "': arrival rate must be >= 0");
    if (cdf.max_length() > ctx_window) {
      throw DomainError("pool '" + label + "': workload reaches " + std::to_string(cdf.max_length()) +
                        " tokens but the pool window is " + std::to_string(ctx_window));
    }
  }
};

/// Anything that maps (lambda, mu, slo) to a server count; nullopt = infeasible.
template <class S>
concept PoolSizer = requires(const S& s, double lambda, double mu, const Slo& slo) {
  { s(lambda, mu, slo) } -> std::convertible_to<std::optional<std::int64_t>>;
};

/// Request-level M/M/c with Erlang-C waiting times.
struct ErlangCSizer {
  std::int64_t max_instances = 1'000'000;

  std::optional<std::int64_t> operator()(double lambda, double mu, const Slo& slo) const {
    return queueing::min_servers(lambda, mu, slo.percentile, slo.bound_ms * 1e-3, max_instances);
  }
};

/// Decode capacity of one instance of the pool: full concurrency with
/// in-flight sequences at the window.
inline double instance_throughput(const PoolConfig& config) {
  const auto n = static_cast<double>(config.profile.n_max(config.ctx_window));
  return decode_throughput(config.profile, n, static_cast<double>(config.ctx_window));
}

/// Requests per second one instance completes.
inline double instance_service_rate(const PoolConfig& config) {
  return instance_throughput(config) / std::max(1.0, config.cdf.mean_output_len());
}

template <PoolSizer Sizer = ErlangCSizer>
std::int64_t size_pool(const PoolConfig& config, const Slo& slo, const Sizer& sizer = {}) {
  config.validate();
  slo.validate();
  if (config.lam == 0.0) return 1;
  if (config.profile.n_max(config.ctx_window) < 1) {
    throw SizingError(config.label, "profile '" + config.profile.name +
                                        "' cannot hold one sequence at window " +
                                        std::to_string(config.ctx_window));
  }
  const auto c = sizer(config.lam, instance_service_rate(config), slo);
  if (!c) {
    throw SizingError(config.label, "no instance count meets the P" +
                                        std::to_string(static_cast<int>(std::lround(slo.percentile * 100))) +
                                        " " + slo.metric + " bound of " + std::to_string(slo.bound_ms) + " ms");
  }
  return *c;
}

struct PoolOperatingPoint {
  double rho = 0.0;
  double n_active_mean = 0.0;
  double pool_power_kw = 0.0;
  double pool_token_rate = 0.0;  // tok/s delivered (demand-limited)

  double tok_per_watt() const { return pool_power_kw > 0.0 ? pool_token_rate / (pool_power_kw * 1e3) : 0.0; }
};

/// Mean in-flight batch is rho * n_max (real-valued); every instance is
/// billed at the power of that batch.
inline PoolOperatingPoint pool_operating_point(const PoolConfig& config, std::int64_t instances) {
  if (instances < 1) throw DomainError("pool_operating_point: instances must be >= 1");
  PoolOperatingPoint op;
  if (config.lam > 0.0) {
    const double mu = instance_service_rate(config);
    op.rho = std::min(1.0, config.lam / (static_cast<double>(instances) * mu));
  }
  op.n_active_mean = op.rho * static_cast<double>(config.profile.n_max(config.ctx_window));
  op.pool_power_kw =
      static_cast<double>(instances) * power_at(config.profile.power, op.n_active_mean) * 1e-3;
  op.pool_token_rate = config.lam * config.cdf.mean_output_len();
  return op;
}

struct PoolPlan {
  PoolConfig config;
  std::int64_t instances = 0;
  PoolOperatingPoint point;
};

struct FleetPlan {
  std::vector<PoolPlan> pools;
  double fleet_power_kw = 0.0;
  double fleet_tok_per_watt = 0.0;
  Slo slo;

  std::int64_t total_instances() const {
    std::int64_t n = 0;
    for (const auto& p : pools) n += p.instances;
    return n;
  }
  double token_rate() const {
    double r = 0.0;
    for (const auto& p : pools) r += p.point.pool_token_rate;
    return r;
  }
};

/// Fleet tok/W: sum of delivered token rates over total fleet power.
inline FleetPlan assemble_plan(std::vector<PoolPlan> pools, const Slo& slo) {
  FleetPlan plan;
  plan.pools = std::move(pools);
  plan.slo = slo;
  for (const auto& p : plan.pools) plan.fleet_power_kw += p.point.pool_power_kw;
  plan.fleet_tok_per_watt =
      plan.fleet_power_kw > 0.0 ? plan.token_rate() / (plan.fleet_power_kw * 1e3) : 0.0;
  return plan;
}

template <PoolSizer Sizer = ErlangCSizer>
FleetPlan fleet_tpw_analysis(const std::vector<PoolConfig>& pools, double lam_total, const Slo& slo,
                             const Sizer& sizer = {}) {
  if (pools.empty()) throw DomainError("fleet_tpw_analysis: no pools");
  double lam_sum = 0.0;
  for (const auto& p : pools) lam_sum += p.lam;
  if (std::abs(lam_sum - lam_total) > 1e-9 + 1e-6 * std::abs(lam_total)) {
    throw DomainError("fleet_tpw_analysis: pool arrival rates sum to " + std::to_string(lam_sum) +
                      ", expected " + std::to_string(lam_total));
  }
  std::vector<PoolPlan> out;
  out.reserve(pools.size());
  for (const auto& cfg : pools) {
    const std::int64_t n = size_pool(cfg, slo, sizer);
    out.push_back({cfg, n, pool_operating_point(cfg, n)});
  }
  return assemble_plan(std::move(out), slo);
}

}  // namespace fleetwatt
