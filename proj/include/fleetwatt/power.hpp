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
#include <string>
#include <string_view>

#include "fleetwatt/error.hpp"

namespace fleetwatt {

/// Provenance of power parameters: HIGH = directly measured, FAIR = projected.
enum class Quality { kHigh, kFair };

inline std::string_view to_string(Quality q) {
  return q == Quality::kHigh ? "HIGH" : "FAIR";
}

inline Quality parse_quality(std::string_view s) {
  if (s == "HIGH") return Quality::kHigh;
  if (s == "FAIR") return Quality::kFair;
  throw DomainError("unknown quality tag '" + std::string(s) + "'");
}

/// Logistic power-vs-concurrency curve:
///
///   P(b) = p_range / (1 + exp(-k * (log2(b) - x0))) + p_idle
///
/// x0 is the half-saturation point in log2-batch units, so the curve passes
/// through p_idle + p_range / 2 at b = 2^x0.
struct PowerCurve {
  double p_idle = 0.0;   // W
  double p_range = 0.0;  // W, p_nom - p_idle
  double k = 1.0;
  double x0 = 0.0;

  double p_nom() const { return p_idle + p_range; }

  void validate() const {
    if (!(p_idle > 0.0) || !(p_range >= 0.0) || !(k > 0.0) || !std::isfinite(x0)) {
      throw DomainError("power curve requires p_idle > 0, p_range >= 0, k > 0");
    }
  }

  friend bool operator==(const PowerCurve&, const PowerCurve&) = default;
};

/// Power draw (W) at a mean in-flight batch of `b` sequences. `b` may be
/// fractional; b = 0 is deep idle and returns p_idle.
inline double power_at(const PowerCurve& curve, double b) {
  if (std::isnan(b) || b < 0.0) {
    throw DomainError("power_at: concurrency must be >= 0");
  }
  if (b == 0.0) return curve.p_idle;
  const double z = -curve.k * (std::log2(b) - curve.x0);
  return curve.p_range / (1.0 + std::exp(z)) + curve.p_idle;
}

inline constexpr double kIdleTdpFraction = 0.43;
inline constexpr double kNominalTdpFraction = 0.86;

/// Projects an unmeasured GPU's curve from its TDP using the idle and nominal
/// fractions validated on H100 (0.43 and 0.86 of TDP).
inline PowerCurve project_power_curve(double tdp_w, double x0, double k = 1.0) {
  if (!(tdp_w > 0.0)) throw DomainError("project_power_curve: tdp must be > 0");
  PowerCurve c;
  c.p_idle = kIdleTdpFraction * tdp_w;
  c.p_range = kNominalTdpFraction * tdp_w - c.p_idle;
  c.k = k;
  c.x0 = x0;
  c.validate();
  return c;
}

/// Half-saturation point from the roofline: log2(W / H0).
inline double derive_x0(double w_ms, double h0_ms) {
  if (!(w_ms > 0.0) || !(h0_ms > 0.0)) {
    throw DomainError("derive_x0: W and H0 must be > 0");
  }
  return std::log2(w_ms / h0_ms);
}

/// Hardware identity of one serving GPU.
struct GpuSpec {
  std::string name;
  double tdp_w = 0.0;
  double vram_gb = 0.0;           // decimal gigabytes (1e9 bytes)
  double mem_bw_bytes_per_s = 0.0;
  PowerCurve power;
  double cost_per_hour = 0.0;     // $/hr per serving instance
  Quality quality = Quality::kFair;
  double bw_efficiency = 1.0;     // achieved / nominal HBM bandwidth during decode

  double vram_bytes() const { return vram_gb * 1e9; }

  void validate() const {
    if (name.empty()) throw DomainError("gpu spec requires a name");
    if (!(tdp_w > 0.0) || !(vram_gb > 0.0) || !(mem_bw_bytes_per_s > 0.0)) {
      throw DomainError("gpu '" + name + "': tdp, vram and bandwidth must be > 0");
    }
    if (!(bw_efficiency > 0.0 && bw_efficiency <= 1.0)) {
      throw DomainError("gpu '" + name + "': bw_efficiency must be in (0, 1]");
    }
    if (cost_per_hour < 0.0) throw DomainError("gpu '" + name + "': negative cost");
    power.validate();
    if (power.p_nom() > tdp_w + 1e-9) {
      throw DomainError("gpu '" + name + "': p_idle + p_range exceeds TDP");
    }
  }

  friend bool operator==(const GpuSpec&, const GpuSpec&) = default;
};

}  // namespace fleetwatt
