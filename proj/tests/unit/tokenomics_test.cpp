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


#include <gtest/gtest.h>

#include "fleetwatt/catalog.hpp"
#include "fleetwatt/tokenomics.hpp"
#include "support/oracles.hpp"

namespace fleetwatt {
namespace {

using testing::for_cases;
using testing::uniform;

const std::vector<std::int64_t> kLadder{2048, 4096, 8192, 16384, 32768, 65536, 131072};

TEST(GpuTokPerWatt, H100At8K) {
  const auto op = gpu_tok_per_watt(catalog::h100_70b_calibrated(), 8192, 128, 8192);
  EXPECT_NEAR(op.tok_per_watt, 8.97, 0.02 * 8.97);
  EXPECT_EQ(op.n_max, 128);
  EXPECT_EQ(op.quality, Quality::kHigh);
}

TEST(GpuTokPerWatt, IdlePoint) {
  const auto op = gpu_tok_per_watt(catalog::h100_70b_calibrated(), 8192, 0, 8192);
  EXPECT_EQ(op.throughput, 0.0);
  EXPECT_EQ(op.power, 300.0);
  EXPECT_EQ(op.tok_per_watt, 0.0);
}

TEST(GpuTokPerWatt, B200At64K) {
  const auto op = gpu_tok_per_watt(catalog::b200_70b_scaled(), 65536, 41, 65536);
  EXPECT_NEAR(op.tok_per_watt, 2.24, 0.02 * 2.24);
  EXPECT_EQ(op.quality, Quality::kFair);
}

TEST(GpuTokPerWatt, Errors) {
  const auto p = catalog::h100_70b_calibrated();
  EXPECT_THROW(gpu_tok_per_watt(p, 8192, 129, 8192), CapacityExceeded);
  EXPECT_THROW(gpu_tok_per_watt(p, 8192, 10, 9000), DomainError);
  EXPECT_THROW(gpu_tok_per_watt(p, 8192, -1, 8192), DomainError);
}

TEST(ContextSweep, H100Table) {
  const auto sweep = context_sweep(catalog::h100_70b_calibrated(), kLadder);
  ASSERT_EQ(sweep.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) {
    const auto& ref = testing::kH100Sweep[i];
    EXPECT_EQ(sweep[i].n_max, ref.n_max);
    EXPECT_NEAR(sweep[i].power, ref.p_sat, 1.0);
    EXPECT_NEAR(sweep[i].tok_per_watt, ref.tok_per_watt, 0.02 * ref.tok_per_watt) << ref.ctx;
  }
}

TEST(ContextSweep, B200Table) {
  const auto sweep = context_sweep(catalog::b200_70b_scaled(), kLadder);
  for (std::size_t i = 0; i < 7; ++i) {
    const auto& ref = testing::kB200Sweep[i];
    EXPECT_NEAR(static_cast<double>(sweep[i].n_max), static_cast<double>(ref.n_max), 2.0);
    EXPECT_NEAR(sweep[i].tok_per_watt, ref.tok_per_watt, 0.03 * ref.tok_per_watt) << ref.ctx;
  }
}

TEST(ContextSweep, SingleWindow) {
  const auto p = catalog::h100_70b_calibrated();
  const auto sweep = context_sweep(p, {16384});
  ASSERT_EQ(sweep.size(), 1u);
  const auto op = gpu_tok_per_watt(p, 16384, 64, 16384);
  EXPECT_EQ(sweep[0].tok_per_watt, op.tok_per_watt);
  EXPECT_THROW(context_sweep(p, {}), DomainError);
}

TEST(HalvingRatios, H100Ladder) {
  const auto r = halving_ratios(context_sweep(catalog::h100_70b_calibrated(), kLadder));
  ASSERT_EQ(r.size(), 6u);
  for (double x : r) {
    EXPECT_GE(x, 0.49);
    EXPECT_LE(x, 0.59);
  }
}

TEST(HalvingRatios, FlatPowerIsExactlyHalf) {
  auto p = catalog::h100_70b_calibrated();
  p.power.p_range = 0.0;
  for (double x : halving_ratios(context_sweep(p, kLadder))) EXPECT_NEAR(x, 0.5, 1e-12);
}

TEST(HalvingRatios, ConstantInput) {
  std::vector<OperatingPoint> pts(3);
  for (std::size_t i = 0; i < 3; ++i) {
    pts[i].ctx_window = 1024LL << i;
    pts[i].tok_per_watt = 3.0;
  }
  for (double x : halving_ratios(pts)) EXPECT_EQ(x, 1.0);
}

TEST(HalvingRatios, RejectsNonDoubling) {
  EXPECT_THROW(halving_ratios(context_sweep(catalog::h100_70b_calibrated(), {2048, 8192})), DomainError);
}

TEST(UtilizationPoint, RoutingPools) {
  const auto p = catalog::h100_70b_calibrated();
  const auto s = utilization_point(p, 8192, 0.85);
  EXPECT_EQ(s.n_active, 108.0);
  EXPECT_NEAR(s.power, 578.0, 0.03 * 578.0);
  EXPECT_NEAR(s.tok_per_watt, 8.77, 0.03 * 8.77);
  const auto l = utilization_point(p, 65536, 0.85);
  EXPECT_EQ(l.n_active, 13.0);
  EXPECT_NEAR(l.power, 413.0, 0.03 * 413.0);
  EXPECT_NEAR(l.tok_per_watt, 1.52, 0.03 * 1.52);
}

TEST(UtilizationPoint, ZeroIsIdle) {
  const auto op = utilization_point(catalog::h100_70b_calibrated(), 8192, 0.0);
  EXPECT_EQ(op.n_active, 0.0);
  EXPECT_EQ(op.power, 300.0);
  EXPECT_THROW(utilization_point(catalog::h100_70b_calibrated(), 8192, 1.5), DomainError);
}

TEST(UtilizationPoint, MeanLengthOverride) {
  const auto p = catalog::h100_70b_calibrated();
  EXPECT_GT(utilization_point(p, 8192, 0.85, 2048.0).tok_per_watt, utilization_point(p, 8192, 0.85).tok_per_watt);
}

TEST(TokPerDollar, Examples) {
  EXPECT_NEAR(tok_per_dollar(2716, 32.2) / 1e6, 0.304, 0.0005);
  EXPECT_NEAR(tok_per_dollar(12960, 64.0) / 1e6, 0.729, 0.0005);
  EXPECT_EQ(tok_per_dollar(0.0, 64.0), 0.0);
  EXPECT_THROW(tok_per_dollar(10.0, 0.0), DomainError);
}

TEST(CompareGenerations, ComputedH100B200) {
  const auto h = build_computed_profile(catalog::h100_sxm5(), catalog::llama31_70b());
  const auto b = build_computed_profile(catalog::b200_sxm(), catalog::llama31_70b());
  const auto cmp = compare_generations({h, b}, 8192);
  EXPECT_GE(cmp.multiplier[0][1], 1.5);
  EXPECT_LE(cmp.multiplier[0][1], 2.9);
  EXPECT_NEAR(cmp.multiplier[1][0] * cmp.multiplier[0][1], 1.0, 1e-12);
}

TEST(CompareGenerations, DuplicateIsOne) {
  const auto p = catalog::h100_70b_calibrated();
  const auto cmp = compare_generations({p, p}, 8192);
  for (const auto& row : cmp.multiplier) {
    for (double m : row) EXPECT_EQ(m, 1.0);
  }
  EXPECT_THROW(compare_generations({p}, 8192), DomainError);
}

TEST(CompareGenerations, H200FromCalibrationPoints) {
  const auto h = calibrate_profile(catalog::h100_sxm5(), catalog::llama31_70b(), 6.72, 8192, 22, 367, 7.41);
  const auto h2 = calibrate_profile(catalog::h200_sxm(), catalog::llama31_70b(), 4.76, 8192, 44, 422, 15.58);
  const auto cmp = compare_generations({h, h2}, 8192);
  EXPECT_NEAR(cmp.multiplier[0][1], 2.1, 0.05);
  ASSERT_TRUE(cmp.rows[1].tok_per_dollar);
  EXPECT_NEAR(*cmp.rows[1].tok_per_dollar / 1e6, 0.49, 0.03 * 0.49);
}

// Properties ---------------------------------------------------------------

GpuProfile random_profile(std::mt19937_64& rng) {
  auto p = build_manual_profile(catalog::b200_sxm(), catalog::llama31_70b(), uniform(rng, 0.5, 20),
                                uniform(rng, 0.01, 1.0), 8192, testing::uniform_int(rng, 1 << 18, 1 << 23));
  // Physically shaped curves: idle at least half of nominal, k <= 1.
  const double idle = uniform(rng, 100, 500);
  p.power = {idle, uniform(rng, 0, idle), uniform(rng, 0.2, 1.0), uniform(rng, 0, 10)};
  return p;
}

TEST(TokenomicsProperties, TokPerWattIdentity) {
  for_cases(2000, 41, [](std::mt19937_64& rng, int) {
    const auto p = random_profile(rng);
    const auto ctx = testing::uniform_int(rng, 512, 131072);
    const auto cap = p.n_max(ctx);
    const double n = uniform(rng, 0, static_cast<double>(cap));
    const auto op = gpu_tok_per_watt(p, ctx, n, uniform(rng, 1, static_cast<double>(ctx)));
    EXPECT_NEAR(op.tok_per_watt * op.power, op.throughput, 1e-9 * std::max(1.0, op.throughput));
  });
}

TEST(TokenomicsProperties, SweepStrictlyDecreasing) {
  for_cases(1000, 42, [](std::mt19937_64& rng, int) {
    const auto p = random_profile(rng);
    const auto sweep = context_sweep(p, kLadder);
    for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
      if (sweep[i + 1].n_max == 0) break;
      EXPECT_LT(sweep[i + 1].tok_per_watt, sweep[i].tok_per_watt);
    }
  });
}

TEST(TokenomicsProperties, ThroughputMonotoneInRho) {
  for_cases(1000, 43, [](std::mt19937_64& rng, int) {
    const auto p = random_profile(rng);
    const auto ctx = testing::uniform_int(rng, 512, 65536);
    const double r1 = uniform(rng, 0, 1);
    const double r2 = uniform(rng, r1, 1);
    EXPECT_LE(utilization_point(p, ctx, r1).throughput, utilization_point(p, ctx, r2).throughput);
  });
}

TEST(TokenomicsProperties, GenerationAdvantageNarrowsAtLongContext) {
  const auto h = context_sweep(catalog::h100_70b_calibrated(), {4096, 65536});
  const auto b = context_sweep(catalog::b200_70b_scaled(), {4096, 65536});
  EXPECT_LT(b[1].tok_per_watt / h[1].tok_per_watt, b[0].tok_per_watt / h[0].tok_per_watt);
}

}  // namespace
}  // namespace fleetwatt
