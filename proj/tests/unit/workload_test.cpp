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
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fleetwatt/workload.hpp"
#include "support/oracles.hpp"

namespace fleetwatt {
namespace {

using testing::for_cases;
using testing::uniform;
using testing::uniform_int;

const ContextCdf& short_dominant() {
  static const ContextCdf cdf = synth_archetype(Archetype::kShortDominant);
  return cdf;
}

const ContextCdf& long_dominant() {
  static const ContextCdf cdf = synth_archetype(Archetype::kLongDominant);
  return cdf;
}

ContextCdf uniform_cdf(std::int64_t lo, std::int64_t hi, std::int64_t step) {
  std::vector<ContextCdf::Mass> m;
  for (auto x = lo; x <= hi; x += step) m.push_back({x, 1.0, 0.0});
  return ContextCdf::from_masses(m, "uniform", false, 100.0);
}

TEST(ContextCdf, RejectsBrokenPoints) {
  EXPECT_THROW(ContextCdf({}, 1.0, "x", false), DomainError);
  EXPECT_THROW(ContextCdf({{10, 0.5, 0}, {10, 1.0, 0}}, 1.0, "x", false), DomainError);
  EXPECT_THROW(ContextCdf({{10, 0.6, 0}, {20, 0.5, 0}}, 1.0, "x", false), DomainError);
  EXPECT_THROW(ContextCdf({{10, 0.5, 0}, {20, 0.9, 0}}, 1.0, "x", false), DomainError);
  EXPECT_THROW(ContextCdf({{0, 1.0, 0}}, 1.0, "x", false), DomainError);
}

TEST(IngestTrace, DirectCounting) {
  std::istringstream in(
      "{\"prompt_tokens\": 900, \"output_tokens\": 100}\n"
      "\n"
      "{\"prompt_tokens\": 800, \"output_tokens\": 200, \"model\": \"x\"}\n"
      "{\"prompt_tokens\": 2500, \"output_tokens\": 500}\n");
  const auto cdf = ingest_trace(in);
  ASSERT_EQ(cdf.points().size(), 2u);
  EXPECT_EQ(cdf.points()[0].length, 1000);
  EXPECT_NEAR(cdf.points()[0].cum_prob, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(cdf.points()[1].length, 3000);
  EXPECT_EQ(cdf.points()[1].cum_prob, 1.0);
  EXPECT_NEAR(cdf.mean_output_len(), 800.0 / 3.0, 1e-9);
}

TEST(IngestTrace, SingleRecord) {
  std::istringstream in("{\"prompt_tokens\": 7, \"output_tokens\": 3}\n");
  const auto cdf = ingest_trace(in);
  ASSERT_EQ(cdf.points().size(), 1u);
  EXPECT_EQ(cdf.points()[0].length, 10);
  EXPECT_EQ(cdf.mean_output_len(), 3.0);
}

TEST(IngestTrace, DefaultOutputTokens) {
  std::istringstream in("{\"prompt_tokens\": 100}\n");
  IngestOptions opt;
  opt.default_output_tokens = 50;
  const auto cdf = ingest_trace(in, opt);
  EXPECT_EQ(cdf.points()[0].length, 150);
  EXPECT_EQ(cdf.mean_output_len(), 50.0);
}

int error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    ingest_trace(in);
  } catch (const IngestionError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

TEST(IngestTrace, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line(""), 0);
  EXPECT_EQ(error_line("{\"prompt_tokens\": 1, \"output_tokens\": 1}\n{oops}\n"), 2);
  EXPECT_EQ(error_line("{\"prompt_tokens\": -1, \"output_tokens\": 1}\n"), 1);
  EXPECT_EQ(error_line("{\"output_tokens\": 1}\n"), 1);
  EXPECT_EQ(error_line("{\"prompt_tokens\": \"12\", \"output_tokens\": 1}\n"), 1);
  EXPECT_EQ(error_line("\n\n[1, 2]\n"), 3);
  EXPECT_EQ(error_line("{\"prompt_tokens\": 1}\n"), 1);
}

TEST(IngestRecords, LognormalQuantiles) {
  const double median = 2000.0;
  const double sigma = 1.0;
  std::mt19937_64 rng(51);
  std::lognormal_distribution<double> d(std::log(median), sigma);
  std::vector<TraceRecord> recs(1000000);
  for (auto& r : recs) r = {std::max<std::int64_t>(1, std::llround(d(rng))), 0};
  const auto cdf = ingest_records(recs);
  for (double p : {0.05, 0.25, 0.5, 0.75, 0.9, 0.99}) {
    const double oracle = median * std::exp(sigma * testing::normal_quantile(p));
    EXPECT_NEAR(static_cast<double>(cdf.quantile(p)), oracle, 0.01 * oracle) << p;
  }
}

TEST(SampleTrace, IngestionConverges) {
  std::mt19937_64 rng(52);
  const auto recs = sample_trace(short_dominant(), 1000000, rng);
  const auto back = ingest_records(recs);
  EXPECT_LT(ks_distance(back, short_dominant()), 0.01);
  EXPECT_NEAR(back.mean_output_len(), short_dominant().mean_output_len(), 0.01 * short_dominant().mean_output_len());
}

TEST(SampleLength, WithinSupport) {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 1000; ++i) {
    const auto x = sample_length(short_dominant(), rng);
    EXPECT_GE(x, short_dominant().min_length());
    EXPECT_LE(x, short_dominant().max_length());
  }
}

TEST(KsDistance, Basics) {
  EXPECT_EQ(ks_distance(short_dominant(), short_dominant()), 0.0);
  const auto a = ContextCdf({{10, 1.0, 0}}, 1, "a", false);
  const auto b = ContextCdf({{20, 1.0, 0}}, 1, "b", false);
  EXPECT_EQ(ks_distance(a, b), 1.0);
}

TEST(SynthArchetype, ShortDominantDefaults) {
  const auto& c = short_dominant();
  EXPECT_NEAR(c.prob_le(4096), 0.89, 0.005);
  EXPECT_EQ(classify_archetype(c), Archetype::kShortDominant);
  EXPECT_TRUE(c.has_output_profile());
  EXPECT_LE(c.max_length(), 65536);
}

TEST(SynthArchetype, LongDominantDefaults) {
  const auto& c = long_dominant();
  EXPECT_NEAR(c.prob_le(8192), 0.74, 0.005);
  EXPECT_GE(c.quantile(0.99), 28 * 1024);
  EXPECT_LE(c.quantile(0.99), 36 * 1024);
}

TEST(SynthArchetype, MixedDefaults) {
  const auto c = synth_archetype(Archetype::kMixed);
  EXPECT_NEAR(c.prob_le(8192), 0.65, 0.005);
  EXPECT_EQ(classify_archetype(c), Archetype::kMixed);
}

TEST(SynthArchetype, PointMass) {
  ArchetypeParams p;
  p.bulk_median = 1024;
  p.bulk_sigma = 0.0;
  p.output_median = 0.0;
  p.tail_weight = 0.0;
  const auto c = synth_archetype(Archetype::kShortDominant, p);
  ASSERT_EQ(c.points().size(), 1u);
  EXPECT_EQ(c.points()[0].length, 1024);
  EXPECT_EQ(c.points()[0].cum_prob, 1.0);
}

TEST(SynthArchetype, InfeasibleConstraint) {
  ArchetypeParams p;
  p.bulk_median = 20000;
  p.tail_median = 30000;
  p.constraint = {1024, 0.9};
  EXPECT_THROW(synth_archetype(Archetype::kShortDominant, p), DomainError);
  ArchetypeParams q = ArchetypeParams::defaults(Archetype::kLongDominant);
  q.p99_target = 100;
  EXPECT_THROW(synth_archetype(Archetype::kLongDominant, q), DomainError);
}

TEST(SplitAt, ShortDominantAt4K) {
  const auto s = split_at(short_dominant(), 4096);
  EXPECT_NEAR(s.alpha, 0.89, 0.005);
  ASSERT_TRUE(s.short_cdf && s.long_cdf);
  EXPECT_LE(s.short_cdf->max_length(), 4096);
  EXPECT_GT(s.long_cdf->min_length(), 4096);
  EXPECT_LT(s.short_cdf->mean_output_len(), s.long_cdf->mean_output_len());
}

TEST(SplitAt, Infinity) {
  const auto s = split_at(short_dominant(), std::numeric_limits<double>::infinity());
  EXPECT_EQ(s.alpha, 1.0);
  EXPECT_TRUE(s.short_cdf);
  EXPECT_FALSE(s.long_cdf);
}

TEST(SplitAt, BelowMinimum) {
  const auto s = split_at(short_dominant(), 1);
  EXPECT_EQ(s.alpha, 0.0);
  EXPECT_FALSE(s.short_cdf);
  EXPECT_TRUE(s.long_cdf);
  EXPECT_THROW(split_at(short_dominant(), 0), DomainError);
}

TEST(SplitAt, UniformHalves) {
  const auto c = uniform_cdf(1000, 10000, 1000);
  const auto s = split_at(c, 5000);
  EXPECT_NEAR(s.alpha, 0.5, 1e-12);
  ASSERT_EQ(s.short_cdf->points().size(), 5u);
  ASSERT_EQ(s.long_cdf->points().size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(s.short_cdf->points()[i].cum_prob, 0.2 * (i + 1), 1e-12);
    EXPECT_NEAR(s.long_cdf->points()[i].cum_prob, 0.2 * (i + 1), 1e-12);
  }
  // No per-record outputs: both sides inherit the parent mean.
  EXPECT_EQ(s.short_cdf->mean_output_len(), 100.0);
  EXPECT_EQ(s.long_cdf->mean_output_len(), 100.0);
}

TEST(Classify, Thresholds) {
  EXPECT_EQ(classify_share(0.95), Archetype::kShortDominant);
  EXPECT_EQ(classify_share(0.80), Archetype::kShortDominant);
  EXPECT_EQ(classify_share(0.74), Archetype::kMixed);
  EXPECT_EQ(classify_share(0.50), Archetype::kMixed);
  EXPECT_EQ(classify_share(0.30), Archetype::kLongDominant);
  EXPECT_EQ(to_string(Archetype::kMixed), "II_Mixed");
}

// Properties ---------------------------------------------------------------

ContextCdf random_cdf(std::mt19937_64& rng, bool outputs) {
  const int n = static_cast<int>(uniform_int(rng, 1, 40));
  std::vector<ContextCdf::Mass> m;
  for (int i = 0; i < n; ++i) {
    const double p = uniform(rng, 0.01, 1.0);
    m.push_back({uniform_int(rng, 1, 131072), p, p * uniform(rng, 0, 4000)});
  }
  return ContextCdf::from_masses(m, "random", outputs, uniform(rng, 1, 2000));
}

TEST(WorkloadProperties, SplitConservation) {
  for_cases(2000, 61, [](std::mt19937_64& rng, int) {
    const auto c = random_cdf(rng, uniform_int(rng, 0, 1) == 1);
    const double b = uniform(rng, 1, 140000);
    const auto s = split_at(c, b);
    EXPECT_NEAR(s.alpha, c.prob_le(b), 1e-12);
    const double es = s.short_cdf ? s.short_cdf->mean_length() : 0.0;
    const double el = s.long_cdf ? s.long_cdf->mean_length() : 0.0;
    EXPECT_NEAR(s.alpha * es + (1 - s.alpha) * el, c.mean_length(), 1e-9 * c.mean_length());
    const double os = s.short_cdf ? s.short_cdf->mean_output_len() : 0.0;
    const double ol = s.long_cdf ? s.long_cdf->mean_output_len() : 0.0;
    EXPECT_NEAR(s.alpha * os + (1 - s.alpha) * ol, c.mean_output_len(), 1e-9 * (1 + c.mean_output_len()));
    if (s.short_cdf) EXPECT_LE(static_cast<double>(s.short_cdf->max_length()), b);
    if (s.long_cdf) EXPECT_GT(static_cast<double>(s.long_cdf->min_length()), b);
  });
}

TEST(WorkloadProperties, ClassifyTotalAndDeterministic) {
  for_cases(2000, 62, [](std::mt19937_64& rng, int) {
    const auto c = random_cdf(rng, true);
    const auto a = classify_archetype(c);
    EXPECT_EQ(a, classify_archetype(c));
    EXPECT_EQ(a, classify_share(c.prob_le(8192)));
  });
}

TEST(WorkloadProperties, QuantileInvertsCdf) {
  for_cases(2000, 63, [](std::mt19937_64& rng, int) {
    const auto c = random_cdf(rng, false);
    const double p = uniform(rng, 0, 1);
    const auto q = c.quantile(p);
    EXPECT_GE(c.prob_le(static_cast<double>(q)), p - 1e-12);
    EXPECT_LT(c.prob_le(static_cast<double>(q) - 1.0), p + 1e-12);
  });
}

}  // namespace
}  // namespace fleetwatt
