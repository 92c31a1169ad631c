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


// Sizes a short-dominant fleet on two GPU profiles and prints how much of the
// tok/W gain comes from routing and how much from the newer GPU.

#include <cstdio>

#include "fleetwatt/fleetwatt.hpp"

int main() {
  using namespace fleetwatt;
  const auto workload = synth_archetype(Archetype::kShortDominant);
  const Slo slo{};
  const double lam = 1000.0;
  const std::vector<std::int64_t> boundaries{2048, 4096, 8192};
  const std::vector<double> gammas{1.0, 2.0, 4.0};

  const auto base = catalog::h100_70b_calibrated();
  const auto next = catalog::b200_70b_scaled();

  double tpw[4];
  int i = 0;
  for (const auto& p : {base, next}) {
    const auto homo = plan_topology(Topology::homogeneous(), workload, p, lam, slo);
    const auto best = optimize(workload, p, lam, slo, boundaries, gammas);
    tpw[i++] = homo.fleet_tok_per_watt;
    tpw[i++] = best.plan.fleet_tok_per_watt;
    std::printf("%-22s homogeneous %6.3f tok/W (%3lld GPUs)  best %6.3f tok/W (%3lld GPUs, B=%lld, gamma=%.0f)\n",
                p.name.c_str(), homo.fleet_tok_per_watt, static_cast<long long>(homo.total_instances()),
                best.plan.fleet_tok_per_watt, static_cast<long long>(best.plan.total_instances()),
                static_cast<long long>(best.best.boundary.value_or(0)), best.best.gamma);
  }
  const auto d = gain_decomposition(tpw[0], tpw[1], tpw[2], tpw[3]);
  std::printf("topology x%.2f  generation x%.2f  combined x%.2f  (product deviation %.1f%%)\n", d.delta_topo,
              d.delta_gen, d.delta_combined, 100.0 * multiplicativity_check(d));
}
