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

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "fleetwatt/catalog.hpp"
#include "fleetwatt/error.hpp"
#include "fleetwatt/fleet.hpp"
#include "fleetwatt/model.hpp"
#include "fleetwatt/perf_model.hpp"
#include "fleetwatt/power.hpp"
#include "fleetwatt/tokenomics.hpp"
#include "fleetwatt/topology.hpp"
#include "fleetwatt/workload.hpp"

// JSON forms of the domain types. Readers that take a `base` apply only the
// fields present in the object, which is how catalog overrides merge.

namespace fleetwatt {

using nlohmann::json;

namespace io_detail {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

inline void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be an object");
}

}  // namespace io_detail

inline void to_json(json& j, const PowerCurve& c) {
  j = json{{"p_idle_w", c.p_idle}, {"p_range_w", c.p_range}, {"k", c.k}, {"x0", c.x0}};
}

inline PowerCurve read_power_curve(const json& j, PowerCurve base = {}) {
  io_detail::require_object(j, "power curve");
  io_detail::read_opt(j, "p_idle_w", base.p_idle);
  io_detail::read_opt(j, "p_range_w", base.p_range);
  if (j.contains("p_nom_w")) base.p_range = j.at("p_nom_w").get<double>() - base.p_idle;
  io_detail::read_opt(j, "k", base.k);
  io_detail::read_opt(j, "x0", base.x0);
  return base;
}

inline void to_json(json& j, const GpuSpec& g) {
  j = json{{"name", g.name},
           {"tdp_w", g.tdp_w},
           {"vram_gb", g.vram_gb},
           {"mem_bw_bytes_per_s", g.mem_bw_bytes_per_s},
           {"power", g.power},
           {"cost_per_hour", g.cost_per_hour},
           {"quality", std::string(to_string(g.quality))},
           {"bw_efficiency", g.bw_efficiency}};
}

inline GpuSpec read_gpu(const json& j, GpuSpec base = {}) {
  io_detail::require_object(j, "gpu entry");
  io_detail::read_opt(j, "name", base.name);
  io_detail::read_opt(j, "tdp_w", base.tdp_w);
  io_detail::read_opt(j, "vram_gb", base.vram_gb);
  io_detail::read_opt(j, "mem_bw_bytes_per_s", base.mem_bw_bytes_per_s);
  if (j.contains("power")) base.power = read_power_curve(j.at("power"), base.power);
  io_detail::read_opt(j, "cost_per_hour", base.cost_per_hour);
  if (j.contains("quality")) base.quality = parse_quality(j.at("quality").get<std::string>());
  io_detail::read_opt(j, "bw_efficiency", base.bw_efficiency);
  return base;
}

inline void to_json(json& j, const ModelSpec& m) {
  j = json{{"name", m.name},
           {"total_params", m.total_params},
           {"active_params", m.active_params ? json(*m.active_params) : json(nullptr)},
           {"layers", m.layers},
           {"kv_heads", m.kv_heads},
           {"head_dim", m.head_dim},
           {"bytes_per_param", m.bytes_per_param},
           {"kv_bytes_per_elem", m.kv_bytes_per_elem},
           {"tp", m.tp}};
}

inline ModelSpec read_model(const json& j, ModelSpec base = {}) {
  io_detail::require_object(j, "model entry");
  io_detail::read_opt(j, "name", base.name);
  io_detail::read_opt(j, "total_params", base.total_params);
  if (j.contains("active_params")) {
    const auto& a = j.at("active_params");
    base.active_params = a.is_null() ? std::nullopt : std::optional<double>(a.get<double>());
  }
  io_detail::read_opt(j, "layers", base.layers);
  io_detail::read_opt(j, "kv_heads", base.kv_heads);
  io_detail::read_opt(j, "head_dim", base.head_dim);
  io_detail::read_opt(j, "bytes_per_param", base.bytes_per_param);
  io_detail::read_opt(j, "kv_bytes_per_elem", base.kv_bytes_per_elem);
  io_detail::read_opt(j, "tp", base.tp);
  return base;
}

/// Full profile record; gpu and model are embedded by value.
inline void to_json(json& j, const GpuProfile& p) {
  j = json{{"name", p.name},
           {"kind", std::string(to_string(p.kind))},
           {"gpu", p.gpu},
           {"model", p.model},
           {"power", p.power},
           {"w_ms", p.w_ms},
           {"w_quality", std::string(to_string(p.w_quality))},
           {"h0_ms", p.h0_ms},
           {"l_calib", p.l_calib},
           {"kv_token_budget", p.kv_token_budget},
           {"nmax_floor", p.nmax_floor},
           {"power_quality", std::string(to_string(p.power_quality()))}};
  if (p.kind == ProfileKind::kComputed) {
    j["bw_efficiency"] = p.bw_efficiency;
    j["vram_reserve_bytes"] = p.vram_reserve_bytes;
    j["kv_sharding"] = std::string(to_string(p.sharding));
    j["dispatch_ms"] = p.dispatch_ms;
  }
}

/// Manual profile entry. `gpu` and `model` may be catalog names or inline
/// objects; `power` overrides fields of the GPU's curve.
inline GpuProfile read_manual_profile(const json& j, const Catalog& cat) {
  io_detail::require_object(j, "profile entry");
  auto resolve_gpu = [&](const json& g) { return g.is_string() ? cat.gpu(g.get<std::string>()) : read_gpu(g); };
  auto resolve_model = [&](const json& m) {
    return m.is_string() ? cat.model(m.get<std::string>()) : read_model(m);
  };
  if (!j.contains("gpu") || !j.contains("model")) throw ConfigError("profile entry needs gpu and model");
  const GpuSpec gpu = resolve_gpu(j.at("gpu"));
  const ModelSpec model = resolve_model(j.at("model"));
  if (j.contains("calibration")) {
    // Fit H0 and x0 to one observed full-concurrency point.
    const json& c = j.at("calibration");
    io_detail::require_object(c, "calibration");
    double w = 0.0;
    std::int64_t l_calib = kDefaultCalibContext;
    io_detail::read_opt(j, "w_ms", w);
    io_detail::read_opt(j, "l_calib", l_calib);
    try {
      GpuProfile p = calibrate_profile(gpu, model, w, c.at("ctx_window").get<std::int64_t>(),
                                       c.at("n_max").get<std::int64_t>(), c.at("p_sat_w").get<double>(),
                                       c.at("tok_per_watt").get<double>(), l_calib);
      io_detail::read_opt(j, "name", p.name);
      return p;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("calibration: ") + e.what());
    }
  }
  double w = 0.0;
  double h0 = 0.0;
  std::int64_t l_calib = kDefaultCalibContext;
  std::int64_t budget = 0;
  io_detail::read_opt(j, "w_ms", w);
  io_detail::read_opt(j, "h0_ms", h0);
  io_detail::read_opt(j, "l_calib", l_calib);
  io_detail::read_opt(j, "kv_token_budget", budget);
  GpuProfile p = build_manual_profile(gpu, model, w, h0, l_calib, budget);
  io_detail::read_opt(j, "name", p.name);
  if (j.contains("power")) p.power = read_power_curve(j.at("power"), p.power);
  io_detail::read_opt(j, "nmax_floor", p.nmax_floor);
  if (j.contains("w_quality")) {
    const auto q = j.at("w_quality").get<std::string>();
    if (q == "LOWER_BOUND") {
      p.w_quality = WQuality::kLowerBound;
    } else if (q != "MEASURED") {
      throw ConfigError("unknown w_quality '" + q + "'");
    }
  }
  return p;
}

/// Catalog file: profiles reference GPUs and models by name.
inline json catalog_to_json(const Catalog& c) {
  json j;
  j["gpus"] = c.gpus;
  j["models"] = c.models;
  j["profiles"] = json::array();
  for (const auto& p : c.profiles) {
    j["profiles"].push_back(json{{"name", p.name},
                                 {"gpu", p.gpu.name},
                                 {"model", p.model.name},
                                 {"w_ms", p.w_ms},
                                 {"h0_ms", p.h0_ms},
                                 {"l_calib", p.l_calib},
                                 {"kv_token_budget", p.kv_token_budget},
                                 {"power", p.power},
                                 {"nmax_floor", p.nmax_floor},
                                 {"w_quality", std::string(to_string(p.w_quality))}});
  }
  return j;
}

/// Merges the entries of `j` over `base` by name.
inline Catalog read_catalog(const json& j, Catalog base) {
  io_detail::require_object(j, "catalog");
  auto each = [&](const char* key, auto&& fn) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array()) throw ConfigError(std::string(key) + " must be a list");
    for (const auto& e : *it) fn(e);
  };
  each("gpus", [&](const json& e) {
    const auto name = e.value("name", std::string{});
    const bool known = std::any_of(base.gpus.begin(), base.gpus.end(), [&](const GpuSpec& g) { return g.name == name; });
    GpuSpec g = read_gpu(e, known ? base.gpu(name) : GpuSpec{});
    g.validate();
    base.upsert(g);
  });
  each("models", [&](const json& e) {
    const auto name = e.value("name", std::string{});
    const bool known =
        std::any_of(base.models.begin(), base.models.end(), [&](const ModelSpec& m) { return m.name == name; });
    ModelSpec m = read_model(e, known ? base.model(name) : ModelSpec{});
    m.validate();
    base.upsert(m);
  });
  each("profiles", [&](const json& e) { base.upsert(read_manual_profile(e, base)); });
  return base;
}

// ---------------------------------------------------------------------------
// Workload

inline json cdf_to_json(const ContextCdf& c) {
  json pts = json::array();
  for (const auto& p : c.points()) {
    if (c.has_output_profile()) {
      pts.push_back(json::array({p.length, p.cum_prob, p.cum_output}));
    } else {
      pts.push_back(json::array({p.length, p.cum_prob}));
    }
  }
  return json{{"label", c.label()},
              {"mean_output_len", c.mean_output_len()},
              {"has_output_profile", c.has_output_profile()},
              {"points", pts}};
}

inline ContextCdf cdf_from_json(const json& j) {
  io_detail::require_object(j, "context CDF");
  try {
    const bool prof = j.value("has_output_profile", false);
    std::vector<CdfPoint> pts;
    for (const auto& e : j.at("points")) {
      if (!e.is_array() || e.size() < 2) throw ConfigError("CDF point must be [length, cum_prob(, cum_output)]");
      CdfPoint p{e.at(0).get<std::int64_t>(), e.at(1).get<double>(), 0.0};
      if (prof) {
        if (e.size() < 3) throw ConfigError("CDF point missing cum_output");
        p.cum_output = e.at(2).get<double>();
      }
      pts.push_back(p);
    }
    return ContextCdf(std::move(pts), j.at("mean_output_len").get<double>(), j.value("label", std::string("cdf")),
                      prof);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("context CDF: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("context CDF: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Planning

inline void to_json(json& j, const Slo& s) {
  j = json{{"metric", s.metric}, {"percentile", s.percentile}, {"bound_ms", s.bound_ms}};
}

inline Slo read_slo(const json& j, Slo base = {}) {
  io_detail::require_object(j, "slo");
  io_detail::read_opt(j, "metric", base.metric);
  io_detail::read_opt(j, "percentile", base.percentile);
  io_detail::read_opt(j, "bound_ms", base.bound_ms);
  if (base.metric != "TTFT") throw ConfigError("only the TTFT SLO metric is supported");
  return base;
}

inline void to_json(json& j, const Topology& t) {
  j = json{{"kind", std::string(to_string(t.kind))},
           {"boundary", t.boundary ? json(*t.boundary) : json(nullptr)},
           {"gamma", t.gamma},
           {"long_window", t.long_window}};
}

inline Topology read_topology(const json& j, Topology base = {}) {
  io_detail::require_object(j, "topology");
  if (j.contains("kind")) base.kind = parse_topology_kind(j.at("kind").get<std::string>());
  if (j.contains("boundary")) {
    const auto& b = j.at("boundary");
    base.boundary = b.is_null() ? std::nullopt : std::optional<std::int64_t>(b.get<std::int64_t>());
  }
  io_detail::read_opt(j, "gamma", base.gamma);
  io_detail::read_opt(j, "long_window", base.long_window);
  return base;
}

inline json plan_to_json(const FleetPlan& plan) {
  json pools = json::array();
  for (const auto& p : plan.pools) {
    pools.push_back(json{{"label", p.config.label},
                         {"profile", p.config.profile.name},
                         {"power_quality", std::string(to_string(p.config.profile.power_quality()))},
                         {"w_quality", std::string(to_string(p.config.profile.w_quality))},
                         {"ctx_window", p.config.ctx_window},
                         {"lam", p.config.lam},
                         {"mean_output_len", p.config.cdf.mean_output_len()},
                         {"instances", p.instances},
                         {"rho", p.point.rho},
                         {"n_active_mean", p.point.n_active_mean},
                         {"pool_power_kw", p.point.pool_power_kw},
                         {"pool_token_rate", p.point.pool_token_rate}});
  }
  return json{{"pools", pools},
              {"total_instances", plan.total_instances()},
              {"fleet_power_kw", plan.fleet_power_kw},
              {"fleet_tok_per_watt", plan.fleet_tok_per_watt},
              {"slo", plan.slo}};
}

}  // namespace fleetwatt
