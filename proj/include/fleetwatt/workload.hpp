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
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fleetwatt/error.hpp"

namespace fleetwatt {

/// cum_output is the partial expectation E[output * 1{length <= this length}],
/// so the mean output of any length range is a difference of two points.
struct CdfPoint {
  std::int64_t length = 0;
  double cum_prob = 0.0;
  double cum_output = 0.0;

  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

/// Empirical distribution of request context length (prompt + output).
class ContextCdf {
 public:
  ContextCdf() = default;

  /// Points must already satisfy the invariants; see validate().
  /// Without an output profile every length range inherits mean_output_len.
  ContextCdf(std::vector<CdfPoint> points, double mean_output_len, std::string label,
             bool has_output_profile)
      : points_(std::move(points)),
        mean_output_len_(mean_output_len),
        label_(std::move(label)),
        has_output_profile_(has_output_profile) {
    validate();
  }

  struct Mass {
    std::int64_t length;
    double prob;
    double output;  // prob-weighted output tokens at this length
  };

  /// Aggregates (length, mass) pairs into a normalized CDF.
  static ContextCdf from_masses(std::vector<Mass> masses, std::string label,
                                bool has_output_profile,
                                std::optional<double> mean_output_len = std::nullopt) {
    std::sort(masses.begin(), masses.end(),
              [](const Mass& a, const Mass& b) { return a.length < b.length; });
    double total = 0.0;
    for (const auto& m : masses) total += m.prob;
    if (!(total > 0.0)) throw DomainError("context distribution has no mass");
    std::vector<CdfPoint> pts;
    double cp = 0.0;
    double co = 0.0;
    for (const auto& m : masses) {
      if (m.prob <= 0.0) continue;
      cp += m.prob / total;
      co += m.output / total;
      if (!pts.empty() && pts.back().length == m.length) {
        pts.back().cum_prob = cp;
        pts.back().cum_output = co;
      } else {
        pts.push_back({m.length, cp, co});
      }
    }
    pts.back().cum_prob = 1.0;
    const double mean_out = has_output_profile ? co : mean_output_len.value_or(co);
    return ContextCdf(std::move(pts), mean_out, std::move(label), has_output_profile);
  }

  const std::vector<CdfPoint>& points() const { return points_; }
  double mean_output_len() const { return mean_output_len_; }
  const std::string& label() const { return label_; }
  bool has_output_profile() const { return has_output_profile_; }
  void set_label(std::string label) { label_ = std::move(label); }

  std::int64_t min_length() const { return points_.front().length; }
  std::int64_t max_length() const { return points_.back().length; }

  /// P[length <= x].
  double prob_le(double x) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), x,
                               [](double v, const CdfPoint& p) { return v < static_cast<double>(p.length); });
    return it == points_.begin() ? 0.0 : std::prev(it)->cum_prob;
  }

  /// Partial output expectation up to length x.
  double output_le(double x) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), x,
                               [](double v, const CdfPoint& p) { return v < static_cast<double>(p.length); });
    if (it == points_.begin()) return 0.0;
    return has_output_profile_ ? std::prev(it)->cum_output : std::prev(it)->cum_prob * mean_output_len_;
  }

  /// Smallest length whose cumulative probability reaches p.
  std::int64_t quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must be in [0, 1]");
    auto it = std::lower_bound(points_.begin(), points_.end(), p,
                               [](const CdfPoint& pt, double v) { return pt.cum_prob < v; });
    return it == points_.end() ? points_.back().length : it->length;
  }

  double mean_length() const {
    double prev = 0.0;
    double acc = 0.0;
    for (const auto& pt : points_) {
      acc += static_cast<double>(pt.length) * (pt.cum_prob - prev);
      prev = pt.cum_prob;
    }
    return acc;
  }

  void validate() const {
    if (points_.empty()) throw DomainError("context CDF needs at least one point");
    double prev_p = 0.0;
    double prev_o = 0.0;
    std::int64_t prev_len = 0;
    for (const auto& pt : points_) {
      if (pt.length < 1 || pt.length <= prev_len) {
        throw DomainError("context CDF lengths must be >= 1 and strictly increasing");
      }
      if (!(pt.cum_prob >= prev_p) || pt.cum_prob > 1.0 + 1e-12) {
        throw DomainError("context CDF probabilities must be nondecreasing in [0, 1]");
      }
      if (has_output_profile_ && !(pt.cum_output >= prev_o - 1e-9)) {
        throw DomainError("context CDF output mass must be nondecreasing");
      }
      prev_len = pt.length;
      prev_p = pt.cum_prob;
      prev_o = pt.cum_output;
    }
    if (std::abs(points_.back().cum_prob - 1.0) > 1e-9) {
      throw DomainError("context CDF must end at cumulative probability 1");
    }
    if (!(mean_output_len_ >= 0.0)) throw DomainError("mean output length must be >= 0");
  }

  friend bool operator==(const ContextCdf&, const ContextCdf&) = default;

 private:
  std::vector<CdfPoint> points_;
  double mean_output_len_ = 0.0;
  std::string label_;
  bool has_output_profile_ = false;
};

/// Kolmogorov-Smirnov distance between two step CDFs.
inline double ks_distance(const ContextCdf& a, const ContextCdf& b) {
  double d = 0.0;
  for (const auto& p : a.points()) d = std::max(d, std::abs(p.cum_prob - b.prob_le(static_cast<double>(p.length))));
  for (const auto& p : b.points()) d = std::max(d, std::abs(p.cum_prob - a.prob_le(static_cast<double>(p.length))));
  return d;
}

// ---------------------------------------------------------------------------
// Trace ingestion

struct TraceRecord {
  std::int64_t prompt_tokens = 0;
  std::int64_t output_tokens = 0;
};

struct IngestOptions {
  /// Used when a record has no output_tokens field; without it such records
  /// are rejected.
  std::optional<std::int64_t> default_output_tokens;
  std::string label = "trace";
};

/// Streaming accumulator: one pass, memory proportional to distinct lengths.
class TraceAccumulator {
 public:
  void add(const TraceRecord& r, std::size_t line = 0) {
    if (r.prompt_tokens < 0 || r.output_tokens < 0) {
      throw IngestionError("token counts must be nonnegative", line);
    }
    const std::int64_t ctx = r.prompt_tokens + r.output_tokens;
    if (ctx < 1) throw IngestionError("record has zero context length", line);
    auto& slot = by_length_[ctx];
    slot.first += 1.0;
    slot.second += static_cast<double>(r.output_tokens);
    ++count_;
  }

  std::size_t count() const { return count_; }

  ContextCdf finish(std::string label) const {
    if (count_ == 0) throw IngestionError("trace contains no records", 0);
    std::vector<ContextCdf::Mass> masses;
    masses.reserve(by_length_.size());
    for (const auto& [len, v] : by_length_) masses.push_back({len, v.first, v.second});
    return ContextCdf::from_masses(std::move(masses), std::move(label), true);
  }

 private:
  std::map<std::int64_t, std::pair<double, double>> by_length_;  // count, output sum
  std::size_t count_ = 0;
};

inline ContextCdf ingest_records(std::span<const TraceRecord> records, std::string label = "trace") {
  TraceAccumulator acc;
  for (std::size_t i = 0; i < records.size(); ++i) acc.add(records[i], i + 1);
  return acc.finish(std::move(label));
}

/// Line-delimited JSON records with prompt_tokens and output_tokens fields.
/// Blank lines are skipped; unknown fields are ignored.
inline ContextCdf ingest_trace(std::istream& in, const IngestOptions& opt = {}) {
  TraceAccumulator acc;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IngestionError(std::string("malformed record: ") + e.what(), lineno);
    }
    if (!j.is_object()) throw IngestionError("record is not an object", lineno);
    auto read_count = [&](const char* key) -> std::optional<std::int64_t> {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) return std::nullopt;
      if (!it->is_number()) throw IngestionError(std::string(key) + " is not a number", lineno);
      const double v = it->get<double>();
      if (!(v >= 0.0) || v != std::floor(v)) {
        throw IngestionError(std::string(key) + " must be a nonnegative integer", lineno);
      }
      return static_cast<std::int64_t>(v);
    };
    const auto prompt = read_count("prompt_tokens");
    if (!prompt) throw IngestionError("missing prompt_tokens", lineno);
    auto output = read_count("output_tokens");
    if (!output) output = opt.default_output_tokens;
    if (!output) throw IngestionError("missing output_tokens and no default configured", lineno);
    acc.add({*prompt, *output}, lineno);
  }
  return acc.finish(opt.label);
}

/// Inverse-transform sample of one context length.
template <class Rng>
std::int64_t sample_length(const ContextCdf& cdf, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return cdf.quantile(u(rng));
}

/// Records whose context lengths follow `cdf`; each record's output is the
/// conditional mean output at its length.
template <class Rng>
std::vector<TraceRecord> sample_trace(const ContextCdf& cdf, std::size_t n, Rng& rng) {
  const auto& pts = cdf.points();
  std::vector<double> cond_out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dp = pts[i].cum_prob - (i ? pts[i - 1].cum_prob : 0.0);
    const double d_o = cdf.has_output_profile() ? pts[i].cum_output - (i ? pts[i - 1].cum_output : 0.0)
                                                : dp * cdf.mean_output_len();
    cond_out[i] = dp > 0.0 ? d_o / dp : 0.0;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TraceRecord> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = u(rng);
    auto it = std::lower_bound(pts.begin(), pts.end(), p,
                               [](const CdfPoint& pt, double v) { return pt.cum_prob < v; });
    if (it == pts.end()) it = std::prev(pts.end());
    const auto idx = static_cast<std::size_t>(it - pts.begin());
    const auto o = std::min<std::int64_t>(it->length, std::llround(cond_out[idx]));
    out.push_back({it->length - o, o});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Routing split

struct SplitWorkload {
  std::optional<ContextCdf> short_cdf;  // lengths <= boundary
  std::optional<ContextCdf> long_cdf;   // lengths > boundary
  double alpha = 0.0;                   // share of requests routed short
  double boundary = 0.0;
};

/// Splits at `boundary` (may be +inf). Empty sides are absent.
inline SplitWorkload split_at(const ContextCdf& cdf, double boundary) {
  if (std::isnan(boundary) || boundary < 1.0) throw DomainError("split_at: boundary must be >= 1");
  SplitWorkload s;
  s.boundary = boundary;
  s.alpha = cdf.prob_le(boundary);
  const double out_short = cdf.output_le(boundary);
  const double out_total = cdf.output_le(std::numeric_limits<double>::infinity());

  std::vector<CdfPoint> lo;
  std::vector<CdfPoint> hi;
  for (const auto& p : cdf.points()) {
    const double co = cdf.has_output_profile() ? p.cum_output : p.cum_prob * cdf.mean_output_len();
    if (static_cast<double>(p.length) <= boundary) {
      lo.push_back({p.length, p.cum_prob / s.alpha, co / s.alpha});
    } else {
      hi.push_back({p.length, (p.cum_prob - s.alpha) / (1.0 - s.alpha),
                    (co - out_short) / (1.0 - s.alpha)});
    }
  }
  auto finish = [&](std::vector<CdfPoint> pts, double mean_out, const char* suffix) {
    // Drop zero-mass leading points produced by renormalization.
    std::vector<CdfPoint> kept;
    for (const auto& p : pts) {
      if (kept.empty() && p.cum_prob <= 0.0) continue;
      kept.push_back(p);
    }
    kept.back().cum_prob = 1.0;
    if (!cdf.has_output_profile()) {
      for (auto& p : kept) p.cum_output = 0.0;
    }
    return ContextCdf(std::move(kept), mean_out, cdf.label() + suffix, cdf.has_output_profile());
  };
  if (s.alpha > 0.0 && !lo.empty()) {
    s.short_cdf = finish(std::move(lo),
                         cdf.has_output_profile() ? out_short / s.alpha : cdf.mean_output_len(),
                         "/short");
  }
  if (s.alpha < 1.0 && !hi.empty()) {
    s.long_cdf = finish(std::move(hi),
                        cdf.has_output_profile() ? (out_total - out_short) / (1.0 - s.alpha)
                                                 : cdf.mean_output_len(),
                        "/long");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Archetypes

enum class Archetype { kShortDominant, kMixed, kLongDominant };

inline std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::kShortDominant: return "I_ShortDominant";
    case Archetype::kMixed: return "II_Mixed";
    case Archetype::kLongDominant: return "III_LongDominant";
  }
  return "?";
}

inline constexpr std::int64_t kArchetypeThresholdTokens = 8192;

/// Buckets by the share of traffic fitting in 8K tokens: >= 0.8 is I,
/// >= 0.5 is II, otherwise III.
inline Archetype classify_share(double share_le_8k) {
  if (share_le_8k >= 0.8) return Archetype::kShortDominant;
  if (share_le_8k >= 0.5) return Archetype::kMixed;
  return Archetype::kLongDominant;
}

inline Archetype classify_archetype(const ContextCdf& cdf) {
  return classify_share(cdf.prob_le(static_cast<double>(kArchetypeThresholdTokens)));
}

struct QuantileConstraint {
  std::int64_t length = 0;
  double prob = 0.0;  // target P[context <= length]
};

/// Record-level generator: prompt length is a two-component lognormal
/// mixture (bulk + heavy tail), output length an independent lognormal, and
/// context = prompt + output truncated at max_len. A sigma of 0 is a point mass.
struct ArchetypeParams {
  double bulk_median = 800.0;
  double bulk_sigma = 1.0;
  double tail_median = 12000.0;
  double tail_sigma = 0.8;
  std::optional<double> tail_weight;  // solved from `constraint` when absent
  double output_median = 200.0;
  double output_sigma = 1.6;
  std::int64_t max_len = 65536;
  QuantileConstraint constraint{4096, 0.89};
  std::optional<std::int64_t> p99_target;  // solved through tail_median when set

  static ArchetypeParams defaults(Archetype kind) {
    ArchetypeParams p;
    switch (kind) {
      case Archetype::kShortDominant:
        break;
      case Archetype::kMixed:
        p.bulk_median = 1500.0;
        p.bulk_sigma = 1.0;
        p.tail_median = 20000.0;
        p.tail_sigma = 0.6;
        p.output_median = 250.0;
        p.output_sigma = 1.2;
        p.constraint = {8192, 0.65};
        break;
      case Archetype::kLongDominant:
        p.bulk_median = 2000.0;
        p.bulk_sigma = 0.9;
        p.tail_median = 16000.0;
        p.tail_sigma = 0.5;
        p.output_median = 300.0;
        p.output_sigma = 1.0;
        p.constraint = {8192, 0.74};
        p.p99_target = 32768;
        break;
    }
    return p;
  }
};

namespace detail {

struct Atom {
  std::int64_t length;
  double prob;
};

inline std::vector<std::int64_t> geometric_grid(std::int64_t lo, std::int64_t hi, int n) {
  std::vector<std::int64_t> g;
  const double r = std::log(static_cast<double>(hi) / static_cast<double>(lo)) / (n - 1);
  for (int i = 0; i < n; ++i) g.push_back(std::llround(static_cast<double>(lo) * std::exp(r * i)));
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Lognormal discretized onto grid cells bounded by geometric midpoints;
/// the outer cells absorb both tails.
inline std::vector<Atom> discretize_lognormal(double median, double sigma,
                                              const std::vector<std::int64_t>& grid) {
  if (!(median >= 0.0) || !(sigma >= 0.0)) throw DomainError("archetype: invalid lognormal parameters");
  if (sigma == 0.0 || median == 0.0) return {{std::llround(median), 1.0}};
  const double mu = std::log(median);
  std::vector<Atom> out;
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double c = 1.0;
    if (i + 1 < grid.size()) {
      const double edge = std::sqrt(static_cast<double>(grid[i]) * static_cast<double>(grid[i + 1]));
      c = normal_cdf((std::log(edge) - mu) / sigma);
    }
    if (c > prev) out.push_back({grid[i], c - prev});
    prev = c;
  }
  return out;
}

/// Bin edges: every integer up to 64, then 64 geometric steps per octave
/// plus 1.5x each power of two, so common routing boundaries are exact.
inline std::vector<std::int64_t> bin_edges(std::int64_t max_len) {
  std::vector<std::int64_t> e;
  for (std::int64_t i = 1; i <= std::min<std::int64_t>(64, max_len); ++i) e.push_back(i);
  for (std::int64_t base = 64; base < max_len; base *= 2) {
    for (int j = 1; j <= 64; ++j) {
      e.push_back(std::llround(static_cast<double>(base) * std::exp2(j / 64.0)));
    }
    e.push_back(base + base / 2);
  }
  e.push_back(max_len);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  while (!e.empty() && e.back() > max_len) e.pop_back();
  return e;
}

/// Joint (prompt, output) atoms folded into context-length masses.
inline std::vector<ContextCdf::Mass> convolve(const std::vector<Atom>& prompt,
                                              const std::vector<Atom>& output) {
  std::vector<ContextCdf::Mass> m;
  m.reserve(prompt.size() * output.size());
  for (const auto& p : prompt) {
    for (const auto& o : output) {
      const double w = p.prob * o.prob;
      m.push_back({p.length + o.length, w, w * static_cast<double>(o.length)});
    }
  }
  return m;
}

inline double mass_le(const std::vector<ContextCdf::Mass>& m, std::int64_t x) {
  double s = 0.0;
  for (const auto& a : m) {
    if (a.length <= x) s += a.prob;
  }
  return s;
}

struct Mixture {
  std::vector<ContextCdf::Mass> bulk;
  std::vector<ContextCdf::Mass> tail;
  std::int64_t max_len;

  double prob_le(double w, std::int64_t x) const {
    const double num = w * mass_le(bulk, x) + (1.0 - w) * mass_le(tail, x);
    const double den = w * mass_le(bulk, max_len) + (1.0 - w) * mass_le(tail, max_len);
    return den > 0.0 ? num / den : 0.0;
  }

  /// Bulk weight hitting P[<= c.length] = c.prob.
  double solve_weight(const QuantileConstraint& c) const {
    double lo = 0.0;
    double hi = 1.0;
    const double f_lo = prob_le(lo, c.length) - c.prob;
    const double f_hi = prob_le(hi, c.length) - c.prob;
    if (f_lo * f_hi > 0.0) {
      throw DomainError("archetype: constraint P[<=" + std::to_string(c.length) + "] = " +
                        std::to_string(c.prob) + " is not reachable by any mixture weight");
    }
    const bool increasing = f_hi > f_lo;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double f = prob_le(mid, c.length) - c.prob;
      if ((f < 0.0) == increasing) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  std::int64_t quantile(double w, double p) const {
    // Only used on sorted candidate lengths; cheap enough at archetype sizes.
    std::vector<ContextCdf::Mass> all;
    for (const auto& a : bulk) all.push_back({a.length, w * a.prob, 0.0});
    for (const auto& a : tail) all.push_back({a.length, (1.0 - w) * a.prob, 0.0});
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.length < b.length; });
    double den = 0.0;
    for (const auto& a : all) {
      if (a.length <= max_len) den += a.prob;
    }
    double acc = 0.0;
    for (const auto& a : all) {
      if (a.length > max_len) break;
      acc += a.prob;
      if (acc / den >= p) return a.length;
    }
    return max_len;
  }
};

inline Mixture build_mixture(const ArchetypeParams& p, double tail_median) {
  const auto prompt_grid = geometric_grid(1, p.max_len, 320);
  const auto output_grid = geometric_grid(1, std::max<std::int64_t>(2, p.max_len / 4), 160);
  const auto out = discretize_lognormal(p.output_median, p.output_sigma, output_grid);
  return {convolve(discretize_lognormal(p.bulk_median, p.bulk_sigma, prompt_grid), out),
          convolve(discretize_lognormal(tail_median, p.tail_sigma, prompt_grid), out), p.max_len};
}

}  // namespace detail

/// Synthetic context CDF for an archetype; throws DomainError when the
/// requested quantile constraints cannot be met.
inline ContextCdf synth_archetype(Archetype kind, const ArchetypeParams& params) {
  if (params.max_len < 2) throw DomainError("archetype: max_len must be >= 2");
  if (params.tail_weight && !(*params.tail_weight >= 0.0 && *params.tail_weight <= 1.0)) {
    throw DomainError("archetype: tail_weight must be in [0, 1]");
  }
  if (!params.tail_weight && !(params.constraint.prob > 0.0 && params.constraint.prob < 1.0)) {
    throw DomainError("archetype: constraint probability must be in (0, 1)");
  }

  double tail_median = params.tail_median;
  auto solve = [&](double tm, double& w) {
    detail::Mixture mix = detail::build_mixture(params, tm);
    w = params.tail_weight ? 1.0 - *params.tail_weight : mix.solve_weight(params.constraint);
    return mix;
  };

  double w = 0.0;
  detail::Mixture mix = solve(tail_median, w);
  if (params.p99_target) {
    const auto target = *params.p99_target;
    double lo = static_cast<double>(params.constraint.length);
    double hi = static_cast<double>(params.max_len);
    double w_lo = 0.0;
    double w_hi = 0.0;
    const auto q_lo = solve(lo, w_lo).quantile(w_lo, 0.99);
    const auto q_hi = solve(hi, w_hi).quantile(w_hi, 0.99);
    if (target < q_lo || target > q_hi) {
      throw DomainError("archetype: p99 target " + std::to_string(target) +
                        " unreachable (range " + std::to_string(q_lo) + ".." +
                        std::to_string(q_hi) + ")");
    }
    for (int i = 0; i < 40; ++i) {
      const double mid = std::sqrt(lo * hi);
      double wm = 0.0;
      if (solve(mid, wm).quantile(wm, 0.99) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    tail_median = hi;
    mix = solve(tail_median, w);
  }

  const auto edges = detail::bin_edges(params.max_len);
  std::vector<ContextCdf::Mass> binned;
  auto add = [&](const std::vector<ContextCdf::Mass>& comp, double weight) {
    if (weight <= 0.0) return;
    for (const auto& a : comp) {
      if (a.length > params.max_len) continue;
      const auto it = std::lower_bound(edges.begin(), edges.end(), a.length);
      binned.push_back({*it, weight * a.prob, weight * a.output});
    }
  };
  add(mix.bulk, w);
  add(mix.tail, 1.0 - w);
  if (binned.empty()) throw DomainError("archetype: no mass within max_len");
  return ContextCdf::from_masses(std::move(binned), std::string(to_string(kind)), true);
}

inline ContextCdf synth_archetype(Archetype kind) {
  return synth_archetype(kind, ArchetypeParams::defaults(kind));
}

}  // namespace fleetwatt
