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


#include <cmath>

#include <gtest/gtest.h>

#include "fleetwatt/catalog.hpp"
#include "fleetwatt/perf_model.hpp"
#include "support/oracles.hpp"

namespace fleetwatt {
namespace {

using testing::for_cases;
using testing::uniform;

TEST(WeightStreamTime, DenseH100) {
  const auto ws = weight_stream_time(catalog::llama31_70b(), catalog::h100_sxm5(), 0.777);
  EXPECT_NEAR(ws.ms, 6.72, 0.01);
  EXPECT_EQ(ws.quality, WQuality::kMeasured);
}

TEST(WeightStreamTime, MoeActiveOverride) {
  const auto ws = weight_stream_time(catalog::qwen3_235b_a22b(), catalog::h100_sxm5(), 1.0);
  EXPECT_NEAR(ws.ms, 1.64, 0.01);
  EXPECT_EQ(ws.quality, WQuality::kLowerBound);
}

TEST(WeightStreamTime, ActiveEqualsTotalIsDense) {
  auto m = catalog::llama31_70b();
  const double dense = weight_stream_time(m, catalog::h100_sxm5(), 0.777).ms;
  m.active_params = m.total_params;
  EXPECT_DOUBLE_EQ(weight_stream_time(m, catalog::h100_sxm5(), 0.777).ms, dense);
}

TEST(WeightStreamTime, Fp8) {
  auto m = catalog::llama31_70b();
  m.bytes_per_param = 1.0;
  EXPECT_NEAR(weight_stream_time(m, catalog::h100_sxm5(), 0.777).ms, 3.36, 0.01);
}

TEST(WeightStreamTime, Errors) {
  auto g = catalog::h100_sxm5();
  EXPECT_THROW(weight_stream_time(catalog::llama31_70b(), g, 0.0), DomainError);
  EXPECT_THROW(weight_stream_time(catalog::llama31_70b(), g, 1.2), DomainError);
  g.mem_bw_bytes_per_s = 0.0;
  EXPECT_THROW(weight_stream_time(catalog::llama31_70b(), g, 0.8), DomainError);
}

TEST(KvScanOverhead, LinearScaling) {
  EXPECT_DOUBLE_EQ(kv_scan_overhead(0.1386, 8192, 8192), 0.1386);
  EXPECT_NEAR(kv_scan_overhead(0.1386, 8192, 65536), 1.109, 0.001);
  EXPECT_NEAR(kv_scan_overhead(0.1386, 8192, 2048), 0.03465, 1e-9);
  EXPECT_THROW(kv_scan_overhead(0.0, 8192, 1), DomainError);
}

TEST(DecodeLatency, TauOracle) {
  const auto p = catalog::h100_70b_calibrated();
  // tau = n_max / (tok/W * P_sat) from the reference 8K and 2K rows.
  const double oracle_ms = 128.0 / (8.97 * 583.0) * 1e3;
  EXPECT_NEAR(decode_iteration_latency(p, 128, 8192), oracle_ms, 0.01 * oracle_ms);
  EXPECT_NEAR(decode_iteration_latency(p, 512, 2048), oracle_ms, 0.01 * oracle_ms);
  EXPECT_DOUBLE_EQ(decode_iteration_latency(p, 0, 8192), 6.72);
  EXPECT_THROW(decode_iteration_latency(p, -1, 8192), DomainError);
}

TEST(DecodeThroughput, Examples) {
  const auto h = catalog::h100_70b_calibrated();
  EXPECT_NEAR(decode_throughput(h, 128, 8192), 8.97 * 583.0, 0.01 * 5233.0);
  EXPECT_DOUBLE_EQ(decode_throughput(h, 0, 8192), 0.0);
  const auto b = catalog::b200_70b_scaled();
  EXPECT_NEAR(decode_throughput(b, 335, 8192), 15.5 * 852.0, 0.01 * 13210.0);
}

TEST(ManualProfile, StoresVerbatim) {
  const auto p = build_manual_profile(catalog::h100_sxm5(), catalog::llama31_70b(), 6.72, 0.1386, 8192, 1048576);
  EXPECT_EQ(p.kind, ProfileKind::kManual);
  EXPECT_EQ(p.w_ms, 6.72);
  EXPECT_EQ(p.h0_ms, 0.1386);
  EXPECT_EQ(p.kv_token_budget, 1048576);
  EXPECT_EQ(p.n_max(8192), 128);
}

TEST(ManualProfile, ScaledBudget) { EXPECT_EQ(catalog::b200_70b_scaled().kv_token_budget, 2747269); }

TEST(ManualProfile, ZeroBudget) {
  const auto p = build_manual_profile(catalog::h100_sxm5(), catalog::llama31_70b(), 6.72, 0.1386, 8192, 0);
  for (std::int64_t ctx : {1, 2048, 131072}) EXPECT_EQ(p.n_max(ctx), 0);
}

TEST(ManualProfile, PresetsMatchLeastSquaresFits) {
  const double h0_h100 = testing::fit_h0(testing::kH100Sweep, testing::kH100W);
  const double h0_b200 = testing::fit_h0(testing::kB200Sweep, testing::kB200W);
  EXPECT_NEAR(h0_h100, 0.1390, 0.0005);
  EXPECT_NEAR(h0_b200, 0.0670, 0.0005);
  EXPECT_NEAR(catalog::h100_70b_calibrated().h0_ms, h0_h100, 0.0005);
  EXPECT_NEAR(catalog::b200_70b_scaled().h0_ms, h0_b200, 0.0005);
  const double x0 = testing::fit_x0(testing::kB200Sweep, 430.0, 430.0);
  EXPECT_NEAR(x0, 4.462, 0.002);
  EXPECT_NEAR(catalog::b200_70b_scaled().power.x0, x0, 0.01);
}

TEST(ComputedProfile, ReplicatedLlama70B) {
  ComputedProfileOptions o;
  o.sharding = KvSharding::kReplicated;
  const auto p = build_computed_profile(catalog::h100_sxm5(), catalog::llama31_70b(), o);
  // Oracle: (80 GB - 17.5 GB - 4 GiB) / (327680 B * 8192).
  const double usable = 80e9 - 140e9 / 8 - 4.0 * 1024 * 1024 * 1024;
  const auto oracle = static_cast<std::int64_t>(std::floor(usable / 327680.0)) / 8192;
  EXPECT_EQ(p.n_max(8192), oracle);
  EXPECT_NEAR(static_cast<double>(p.n_max(8192)), 22.0, 1.0);
  EXPECT_EQ(p.kind, ProfileKind::kComputed);
  EXPECT_NEAR(p.w_ms, 6.72, 0.01);
}

TEST(ComputedProfile, ReplicatedLlama8B) {
  ComputedProfileOptions o;
  o.sharding = KvSharding::kReplicated;
  o.vram_reserve_gib = 2.0;
  const auto p = build_computed_profile(catalog::h100_sxm5(), catalog::llama31_8b(), o);
  EXPECT_NEAR(static_cast<double>(p.n_max(8192)), 58.0, 2.0);
}

TEST(ComputedProfile, Llama405BInfeasibleOnH100) {
  try {
    build_computed_profile(catalog::h100_sxm5(), catalog::llama31_405b());
    FAIL() << "expected InfeasibleModel";
  } catch (const InfeasibleModel& e) {
    EXPECT_GT(e.deficit_bytes(), 0.0);
  }
}

TEST(ComputedProfile, ClampFloorsAtOne) {
  ComputedProfileOptions o;
  o.clamp_infeasible = true;
  const auto p = build_computed_profile(catalog::h100_sxm5(), catalog::llama31_405b(), o);
  EXPECT_EQ(p.n_max(8192), 1);
  EXPECT_EQ(p.n_max(131072), 1);
}

TEST(ComputedProfile, Llama405BOnB200) {
  ComputedProfileOptions o;
  o.sharding = KvSharding::kReplicated;
  const auto p = build_computed_profile(catalog::b200_sxm(), catalog::llama31_405b(), o);
  EXPECT_NEAR(static_cast<double>(p.n_max(8192)), 17.0, 2.0);
}

TEST(ComputedProfile, H0FromKappaAndBandwidth) {
  const auto p = build_computed_profile(catalog::h100_sxm5(), catalog::llama31_70b());
  const double kappa = 2.0 * 80 * 1 * 128 * 2;
  EXPECT_NEAR(p.h0_ms, kappa * 8192 / (3.35e12 * 0.777) * 1e3, 1e-12);
}

TEST(ComputedProfile, X0RecomputedOnlyForProjectedCurves) {
  const auto h = build_computed_profile(catalog::h100_sxm5(), catalog::llama31_70b());
  EXPECT_DOUBLE_EQ(h.power.x0, 4.2);
  const auto b = build_computed_profile(catalog::b200_sxm(), catalog::llama31_70b());
  EXPECT_DOUBLE_EQ(b.power.x0, derive_x0(b.w_ms, b.h0_ms));
}

TEST(ComputedProfile, MoeCarriesLowerBound) {
  ComputedProfileOptions o;
  o.bw_efficiency = 1.0;
  const auto p = build_computed_profile(catalog::h100_sxm5(), catalog::qwen3_235b_a22b(), o);
  EXPECT_EQ(p.w_quality, WQuality::kLowerBound);
  EXPECT_GE(p.w_ms, 1.5);
  EXPECT_LE(p.w_ms, 2.2);
}

TEST(ComputedProfile, DispatchAddsToW) {
  ComputedProfileOptions o;
  o.dispatch_ms = 10.0;
  const auto base = build_computed_profile(catalog::h100_sxm5(), catalog::qwen3_235b_a22b());
  const auto slow = build_computed_profile(catalog::h100_sxm5(), catalog::qwen3_235b_a22b(), o);
  EXPECT_NEAR(slow.w_ms - base.w_ms, 10.0, 1e-12);
}

TEST(CalibrateProfile, RecoversOperatingPoint) {
  const auto p = calibrate_profile(catalog::h200_sxm(), catalog::llama31_70b(), 4.76, 8192, 44, 422, 15.58);
  EXPECT_EQ(p.n_max(8192), 44);
  EXPECT_NEAR(power_at(p.power, 44), 422.0, 1e-9);
  const double tpw = decode_throughput(p, 44, 8192) / power_at(p.power, 44);
  EXPECT_NEAR(tpw, 15.58, 1e-9);
  EXPECT_THROW(calibrate_profile(catalog::h200_sxm(), catalog::llama31_70b(), 4.76, 8192, 44, 650, 15.58),
               DomainError);
}

// Properties ---------------------------------------------------------------

GpuProfile random_manual(std::mt19937_64& rng) {
  return build_manual_profile(catalog::h100_sxm5(), catalog::llama31_70b(), uniform(rng, 0.5, 20),
                              uniform(rng, 0.01, 1.0), 8192,
                              testing::uniform_int(rng, 1 << 17, 1 << 23));
}

TEST(PerfProperties, FullConcurrencyLatencyInvariance) {
  const std::vector<std::int64_t> windows{2048, 4096, 8192, 16384, 32768, 65536, 131072};
  for_cases(1000, 21, [&](std::mt19937_64& rng, int) {
    const auto p = random_manual(rng);
    // Real-valued n = budget / window removes the floor.
    const double ref = decode_iteration_latency(p, static_cast<double>(p.kv_token_budget) / 2048.0, 2048);
    for (auto w : windows) {
      const double n = static_cast<double>(p.kv_token_budget) / static_cast<double>(w);
      EXPECT_NEAR(decode_iteration_latency(p, n, static_cast<double>(w)), ref, 1e-9 * ref);
    }
  });
}

TEST(PerfProperties, MoeLowerBound) {
  for_cases(1000, 22, [](std::mt19937_64& rng, int) {
    auto m = catalog::qwen3_235b_a22b();
    m.total_params = uniform(rng, 1e9, 1e12);
    m.active_params = uniform(rng, 0.01, 1.0) * m.total_params;
    auto dense = m;
    dense.active_params.reset();
    const double eff = uniform(rng, 0.1, 1.0);
    EXPECT_LE(weight_stream_time(m, catalog::b200_sxm(), eff).ms,
              weight_stream_time(dense, catalog::b200_sxm(), eff).ms);
  });
}

TEST(PerfProperties, QuantizationLinearity) {
  for_cases(1000, 23, [](std::mt19937_64& rng, int) {
    auto m = catalog::llama31_70b();
    m.total_params = uniform(rng, 1e9, 1e12);
    m.bytes_per_param = uniform(rng, 0.5, 4.0);
    auto half = m;
    half.bytes_per_param = m.bytes_per_param / 2.0;
    const double eff = uniform(rng, 0.1, 1.0);
    const double full_ms = weight_stream_time(m, catalog::h100_sxm5(), eff).ms;
    EXPECT_NEAR(weight_stream_time(half, catalog::h100_sxm5(), eff).ms, full_ms / 2.0, 1e-12 * full_ms);
  });
}

TEST(PerfProperties, KvScanLinearity) {
  for_cases(1000, 24, [](std::mt19937_64& rng, int) {
    const double h0 = uniform(rng, 1e-3, 2.0);
    const double lc = uniform(rng, 128, 65536);
    const double l = uniform(rng, 1, 131072);
    const double s = uniform(rng, 0.1, 10);
    EXPECT_NEAR(kv_scan_overhead(h0, lc, s * l), s * kv_scan_overhead(h0, lc, l),
                1e-12 * s * kv_scan_overhead(h0, lc, l));
  });
}

TEST(PerfProperties, ComputedProfileDeterminism) {
  const auto gpus = catalog::builtin().gpus;
  for_cases(1000, 25, [&](std::mt19937_64& rng, int) {
    const auto& g = gpus[static_cast<std::size_t>(testing::uniform_int(rng, 0, 3))];
    ComputedProfileOptions o;
    o.bw_efficiency = uniform(rng, 0.3, 1.0);
    o.vram_reserve_gib = uniform(rng, 0, 8);
    o.sharding = testing::uniform_int(rng, 0, 1) ? KvSharding::kReplicated : KvSharding::kTpSharded;
    const auto a = build_computed_profile(g, catalog::llama31_70b(), o);
    const auto b = build_computed_profile(g, catalog::llama31_70b(), o);
    EXPECT_TRUE(a == b);
  });
}

}  // namespace
}  // namespace fleetwatt
