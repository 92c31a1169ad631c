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
#include <string_view>
#include <tuple>
#include <vector>

#include "fleetwatt/error.hpp"
#include "fleetwatt/fleet.hpp"
#include "fleetwatt/perf_model.hpp"
#include "fleetwatt/workload.hpp"

namespace fleetwatt {

enum class TopologyKind { kHomogeneous, kTwoPool, kFleetOpt };

inline std::string_view to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::kHomogeneous: return "homogeneous";
    case TopologyKind::kTwoPool: return "two_pool";
    case TopologyKind::kFleetOpt: return "fleet_opt";
  }
  return "?";
}

inline TopologyKind parse_topology_kind(std::string_view s) {
  if (s == "homogeneous") return TopologyKind::kHomogeneous;
  if (s == "two_pool" || s == "two-pool") return TopologyKind::kTwoPool;
  if (s == "fleet_opt" || s == "fleetopt") return TopologyKind::kFleetOpt;
  throw DomainError("unknown topology '" + std::string(s) + "'");
}

inline constexpr std::int64_t kDefaultLongWindow = 65536;

/// Routing topology. Requests with context <= boundary go to the short pool,
/// which is configured with window gamma * boundary (headroom for generated
/// tokens); the rest go to the long pool at long_window.
struct Topology {
  TopologyKind kind = TopologyKind::kHomogeneous;
  std::optional<std::int64_t> boundary;
  double gamma = 1.0;
  std::int64_t long_window = kDefaultLongWindow;

  static Topology homogeneous(std::int64_t long_window = kDefaultLongWindow) {
    return {TopologyKind::kHomogeneous, std::nullopt, 1.0, long_window};
  }
  static Topology two_pool(std::int64_t boundary, std::int64_t long_window = kDefaultLongWindow) {
    return {TopologyKind::kTwoPool, boundary, 1.0, long_window};
  }
  static Topology fleet_opt(std::int64_t boundary, double gamma,
                            std::int64_t long_window = kDefaultLongWindow) {
    return {TopologyKind::kFleetOpt, boundary, gamma, long_window};
  }

  std::int64_t short_window() const {
    return static_cast<std::int64_t>(std::llround(gamma * static_cast<double>(boundary.value_or(0))));
  }

  void validate() const {
    if (long_window < 1) throw DomainError("topology: long window must be >= 1");
    if (kind == TopologyKind::kHomogeneous) return;
    if (!boundary || *boundary < 1) throw DomainError("topology: split topologies need a boundary >= 1");
    if (*boundary >= long_window) {
      throw DomainError("topology: boundary " + std::to_string(*boundary) +
                        " must be below the long window " + std::to_string(long_window));
    }
    if (!(gamma >= 1.0)) throw DomainError("topology: gamma must be >= 1");
    if (kind == TopologyKind::kTwoPool && gamma != 1.0) {
      throw DomainError("topology: two-pool routing has gamma = 1");
    }
    if (short_window() > long_window) {
      throw DomainError("topology: short window gamma * boundary exceeds the long window");
    }
  }

  friend bool operator==(const Topology&, const Topology&) = default;
};

/// Maps a pool's context window to the profile serving it.
template <class F>
concept ProfileFactory = requires(const F& f, std::int64_t window) {
  { f(window) } -> std::convertible_to<GpuProfile>;
};

/// Same profile for every pool.
struct SameProfile {
  GpuProfile profile;
  const GpuProfile& operator()(std::int64_t) const { return profile; }
};

/// Splits the workload per the topology and sizes each non-empty pool.
template <ProfileFactory Factory, PoolSizer Sizer = ErlangCSizer>
FleetPlan plan_topology(const Topology& topology, const ContextCdf& workload, const Factory& profile_for,
                        double lam, const Slo& slo, const Sizer& sizer = {}) {
  topology.validate();
  if (workload.max_length() > topology.long_window) {
    throw DomainError("topology: workload reaches " + std::to_string(workload.max_length()) +
                      " tokens, beyond the long window " + std::to_string(topology.long_window));
  }
  std::vector<PoolConfig> pools;
  // A short pool configured at the long window is indistinguishable from the
  // long pool, so both are served as one.
  if (topology.kind == TopologyKind::kHomogeneous || topology.short_window() == topology.long_window) {
    pools.push_back({profile_for(topology.long_window), topology.long_window, workload, lam, "homogeneous"});
  } else {
    const SplitWorkload split = split_at(workload, static_cast<double>(*topology.boundary));
    if (split.short_cdf) {
      const std::int64_t w = topology.short_window();
      pools.push_back({profile_for(w), w, *split.short_cdf, lam * split.alpha, "short"});
    }
    if (split.long_cdf) {
      pools.push_back({profile_for(topology.long_window), topology.long_window, *split.long_cdf,
                       lam * (1.0 - split.alpha), "long"});
    }
  }
  double lam_sum = 0.0;
  for (const auto& p : pools) lam_sum += p.lam;
  return fleet_tpw_analysis(pools, lam_sum, slo, sizer);
}

template <PoolSizer Sizer = ErlangCSizer>
FleetPlan plan_topology(const Topology& topology, const ContextCdf& workload, const GpuProfile& profile,
                        double lam, const Slo& slo, const Sizer& sizer = {}) {
  return plan_topology(topology, workload, SameProfile{profile}, lam, slo, sizer);
}

struct Candidate {
  Topology topology;
  std::optional<FleetPlan> plan;  // absent when sizing failed
  std::string error;

  double tok_per_watt() const { return plan ? plan->fleet_tok_per_watt : 0.0; }
};

struct OptimizationResult {
  Topology best;
  FleetPlan plan;
  std::vector<Candidate> ranked;  // every grid point, best first, infeasible last
};

/// Exhaustive grid search over (boundary, gamma). gamma = 1 points are
/// two-pool topologies. Ties break towards fewer instances, then smaller
/// boundary, then smaller gamma.
template <ProfileFactory Factory, PoolSizer Sizer = ErlangCSizer>
OptimizationResult optimize(const ContextCdf& workload, const Factory& profile_for, double lam,
                            const Slo& slo, const std::vector<std::int64_t>& boundary_grid,
                            const std::vector<double>& gamma_grid,
                            std::int64_t long_window = kDefaultLongWindow, const Sizer& sizer = {}) {
  if (boundary_grid.empty() || gamma_grid.empty()) throw DomainError("optimize: empty grid");
  std::vector<Candidate> cands;
  for (std::int64_t b : boundary_grid) {
    for (double g : gamma_grid) {
      Topology t = g == 1.0 ? Topology::two_pool(b, long_window) : Topology::fleet_opt(b, g, long_window);
      try {
        t.validate();
      } catch (const DomainError&) {
        continue;
      }
      Candidate c{t, std::nullopt, {}};
      try {
        c.plan = plan_topology(t, workload, profile_for, lam, slo, sizer);
      } catch (const SizingError& e) {
        c.error = e.what();
      }
      cands.push_back(std::move(c));
    }
  }
  auto key = [](const Candidate& c) {
    return std::make_tuple(!c.plan.has_value(), -c.tok_per_watt(),
                           c.plan ? c.plan->total_instances() : std::int64_t{0},
                           c.topology.boundary.value_or(0), c.topology.gamma);
  };
  std::stable_sort(cands.begin(), cands.end(),
                   [&](const Candidate& a, const Candidate& b) { return key(a) < key(b); });
  if (cands.empty() || !cands.front().plan) {
    throw OptimizationError("optimize: no feasible topology on the grid");
  }
  OptimizationResult r{cands.front().topology, *cands.front().plan, std::move(cands)};
  return r;
}

template <PoolSizer Sizer = ErlangCSizer>
OptimizationResult optimize(const ContextCdf& workload, const GpuProfile& profile, double lam,
                            const Slo& slo, const std::vector<std::int64_t>& boundary_grid,
                            const std::vector<double>& gamma_grid,
                            std::int64_t long_window = kDefaultLongWindow, const Sizer& sizer = {}) {
  return optimize(workload, SameProfile{profile}, lam, slo, boundary_grid, gamma_grid, long_window, sizer);
}

/// Topology and generation gains relative to the base-GPU homogeneous fleet.
struct GainDecomposition {
  double delta_topo = 0.0;
  double delta_gen = 0.0;
  double delta_combined = 0.0;
};

inline GainDecomposition gain_decomposition(double tpw_base_homo, double tpw_base_opt,
                                            double tpw_new_homo, double tpw_new_opt) {
  if (!(tpw_base_homo > 0.0) || !(tpw_base_opt > 0.0) || !(tpw_new_homo > 0.0) || !(tpw_new_opt > 0.0)) {
    throw DomainError("gain_decomposition: tok/W inputs must be > 0");
  }
  return {tpw_base_opt / tpw_base_homo, tpw_new_homo / tpw_base_homo, tpw_new_opt / tpw_base_homo};
}

/// Relative gap between the combined gain and the product of the two factors.
inline double multiplicativity_check(const GainDecomposition& d) {
  return std::abs(d.delta_combined - d.delta_topo * d.delta_gen) / d.delta_combined;
}

}  // namespace fleetwatt
