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
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fleetwatt/fleetwatt.hpp"

namespace fleetwatt::cli {

using nlohmann::json;
using report::Cell;
using report::Column;
using report::Format;
using report::Report;
using report::Table;

enum ExitCode : int { kOk = 0, kConfigError = 2, kInfeasible = 3, kIngestionError = 4 };

struct WorkloadSource {
  enum class Kind { kNone, kTrace, kCdfFile, kArchetype };
  Kind kind = Kind::kNone;
  std::string path;
  Archetype archetype = Archetype::kShortDominant;
  json params = json::object();  // archetype parameter overrides
};

struct RoutingSubject {
  std::string label;
  std::string profile;  // empty: the primary profile
  std::int64_t ctx_window = 0;
};

/// Everything a command needs. Built from defaults, then the config file,
/// then command-line flags.
struct RunConfig {
  json catalog = json::object();  // overrides merged over the built-in catalog, or a file path
  std::optional<std::string> profile;
  std::optional<std::string> gpu;
  std::optional<std::string> model;
  std::optional<std::string> compare_profile;

  std::optional<double> bw_efficiency;
  double vram_reserve_gib = kDefaultVramReserveGiB;
  KvSharding sharding = KvSharding::kTpSharded;
  double dispatch_ms = 0.0;
  bool clamp_infeasible = false;

  WorkloadSource workload;
  std::optional<std::int64_t> default_output_tokens;

  Slo slo;
  double arrival_rate = 1000.0;
  double rho = 0.85;

  std::vector<std::int64_t> contexts{2048, 4096, 8192, 16384, 32768, 65536, 131072};
  std::int64_t context = 8192;

  Topology topology = Topology::homogeneous();
  std::vector<std::int64_t> boundaries{2048, 4096, 8192};
  std::vector<double> gammas{1.0, 2.0, 4.0};

  std::string compare_what = "generations";
  std::vector<std::string> subjects;
  std::vector<RoutingSubject> routing;

  Format format = Format::kTable;
};

inline Format parse_format(const std::string& s) {
  if (s == "table" || s == "markdown") return Format::kTable;
  if (s == "csv") return Format::kCsv;
  if (s == "json") return Format::kJson;
  throw ConfigError("unknown format '" + s + "' (table, csv, json)");
}

inline KvSharding parse_sharding(const std::string& s) {
  if (s == "tp_sharded" || s == "tp-sharded") return KvSharding::kTpSharded;
  if (s == "replicated") return KvSharding::kReplicated;
  throw ConfigError("unknown kv sharding '" + s + "' (tp_sharded, replicated)");
}

inline Archetype parse_archetype(const std::string& s) {
  if (s == "short_dominant" || s == "I" || s == "I_ShortDominant") return Archetype::kShortDominant;
  if (s == "mixed" || s == "II" || s == "II_Mixed") return Archetype::kMixed;
  if (s == "long_dominant" || s == "III" || s == "III_LongDominant") return Archetype::kLongDominant;
  throw ConfigError("unknown archetype '" + s + "' (short_dominant, mixed, long_dominant)");
}

inline std::string archetype_key(Archetype a) {
  switch (a) {
    case Archetype::kShortDominant: return "short_dominant";
    case Archetype::kMixed: return "mixed";
    case Archetype::kLongDominant: return "long_dominant";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Config file <-> RunConfig

inline json workload_to_json(const WorkloadSource& w) {
  switch (w.kind) {
    case WorkloadSource::Kind::kNone: return nullptr;
    case WorkloadSource::Kind::kTrace: return json{{"trace", w.path}};
    case WorkloadSource::Kind::kCdfFile: return json{{"cdf", w.path}};
    case WorkloadSource::Kind::kArchetype:
      return json{{"archetype", archetype_key(w.archetype)}, {"params", w.params}};
  }
  return nullptr;
}

inline WorkloadSource workload_from_json(const json& j) {
  WorkloadSource w;
  if (j.is_null()) return w;
  if (!j.is_object()) throw ConfigError("workload must be an object");
  const int n = static_cast<int>(j.contains("trace")) + static_cast<int>(j.contains("cdf")) +
                static_cast<int>(j.contains("archetype"));
  if (n != 1) throw ConfigError("workload needs exactly one of trace, cdf, archetype");
  if (j.contains("trace")) {
    w.kind = WorkloadSource::Kind::kTrace;
    w.path = j.at("trace").get<std::string>();
  } else if (j.contains("cdf")) {
    w.kind = WorkloadSource::Kind::kCdfFile;
    w.path = j.at("cdf").get<std::string>();
  } else {
    w.kind = WorkloadSource::Kind::kArchetype;
    w.archetype = parse_archetype(j.at("archetype").get<std::string>());
    if (j.contains("params")) {
      if (!j.at("params").is_object()) throw ConfigError("workload params must be an object");
      w.params = j.at("params");
    }
  }
  return w;
}

inline json to_json_value(const RunConfig& c) {
  auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
  json routing = json::array();
  for (const auto& r : c.routing) {
    routing.push_back(json{{"label", r.label}, {"profile", r.profile}, {"ctx_window", r.ctx_window}});
  }
  json j;
  j["catalog"] = c.catalog;
  j["profile"] = opt(c.profile);
  j["gpu"] = opt(c.gpu);
  j["model"] = opt(c.model);
  j["compare_profile"] = opt(c.compare_profile);
  j["computed"] = json{{"bw_efficiency", c.bw_efficiency ? json(*c.bw_efficiency) : json(nullptr)},
                       {"vram_reserve_gib", c.vram_reserve_gib},
                       {"kv_sharding", std::string(to_string(c.sharding))},
                       {"dispatch_ms", c.dispatch_ms},
                       {"clamp_infeasible", c.clamp_infeasible}};
  j["workload"] = workload_to_json(c.workload);
  j["default_output_tokens"] = c.default_output_tokens ? json(*c.default_output_tokens) : json(nullptr);
  j["slo"] = c.slo;
  j["arrival_rate"] = c.arrival_rate;
  j["rho"] = c.rho;
  j["contexts"] = c.contexts;
  j["context"] = c.context;
  j["topology"] = c.topology;
  j["grid"] = json{{"boundaries", c.boundaries}, {"gammas", c.gammas}};
  j["compare"] = json{{"what", c.compare_what}, {"subjects", c.subjects}, {"routing", routing}};
  j["format"] = std::string(report::to_string(c.format));
  return j;
}

/// Applies the keys present in `j` over `c`. A full report (with "command"
/// and "config") is accepted and its embedded config is used.
inline void apply_config_json(const json& src, RunConfig& c) {
  const json& j = (src.contains("command") && src.contains("config")) ? src.at("config") : src;
  if (!j.is_object()) throw ConfigError("config must be an object");
  try {
    auto str_opt = [&](const char* key, std::optional<std::string>& out) {
      if (!j.contains(key)) return;
      const auto& v = j.at(key);
      out = v.is_null() ? std::nullopt : std::optional<std::string>(v.get<std::string>());
    };
    if (j.contains("catalog")) {
      if (!j.at("catalog").is_object() && !j.at("catalog").is_string()) {
        throw ConfigError("catalog must be an object or a file path");
      }
      c.catalog = j.at("catalog");
    }
    str_opt("profile", c.profile);
    str_opt("gpu", c.gpu);
    str_opt("model", c.model);
    str_opt("compare_profile", c.compare_profile);
    if (j.contains("computed")) {
      const json& k = j.at("computed");
      if (k.contains("bw_efficiency")) {
        const auto& v = k.at("bw_efficiency");
        c.bw_efficiency = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      }
      io_detail::read_opt(k, "vram_reserve_gib", c.vram_reserve_gib);
      if (k.contains("kv_sharding")) c.sharding = parse_sharding(k.at("kv_sharding").get<std::string>());
      io_detail::read_opt(k, "dispatch_ms", c.dispatch_ms);
      io_detail::read_opt(k, "clamp_infeasible", c.clamp_infeasible);
    }
    if (j.contains("workload")) c.workload = workload_from_json(j.at("workload"));
    if (j.contains("default_output_tokens")) {
      const auto& v = j.at("default_output_tokens");
      c.default_output_tokens = v.is_null() ? std::nullopt : std::optional<std::int64_t>(v.get<std::int64_t>());
    }
    if (j.contains("slo")) c.slo = read_slo(j.at("slo"), c.slo);
    io_detail::read_opt(j, "arrival_rate", c.arrival_rate);
    io_detail::read_opt(j, "rho", c.rho);
    io_detail::read_opt(j, "contexts", c.contexts);
    io_detail::read_opt(j, "context", c.context);
    if (j.contains("topology")) c.topology = read_topology(j.at("topology"), c.topology);
    if (j.contains("grid")) {
      io_detail::read_opt(j.at("grid"), "boundaries", c.boundaries);
      io_detail::read_opt(j.at("grid"), "gammas", c.gammas);
    }
    if (j.contains("compare")) {
      const json& k = j.at("compare");
      io_detail::read_opt(k, "what", c.compare_what);
      io_detail::read_opt(k, "subjects", c.subjects);
      if (k.contains("routing")) {
        c.routing.clear();
        for (const auto& r : k.at("routing")) {
          c.routing.push_back({r.value("label", std::string{}), r.value("profile", std::string{}),
                               r.at("ctx_window").get<std::int64_t>()});
        }
      }
    }
    if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + " '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Resolution

struct Context {
  RunConfig config;
  Catalog catalog;

  ComputedProfileOptions computed_options() const {
    ComputedProfileOptions o;
    o.bw_efficiency = config.bw_efficiency;
    o.vram_reserve_gib = config.vram_reserve_gib;
    o.sharding = config.sharding;
    o.dispatch_ms = config.dispatch_ms;
    o.clamp_infeasible = config.clamp_infeasible;
    return o;
  }

  GpuProfile computed(const std::string& gpu, const std::string& model) const {
    return build_computed_profile(catalog.gpu(gpu), catalog.model(model), computed_options());
  }

  bool is_gpu(const std::string& name) const {
    return std::any_of(catalog.gpus.begin(), catalog.gpus.end(), [&](const GpuSpec& g) { return g.name == name; });
  }

  /// A profile spec is a catalog profile name, "GPU/MODEL", or a GPU name
  /// combined with `default_model`.
  GpuProfile resolve(const std::string& spec, const std::optional<std::string>& default_model) const {
    if (catalog.has_profile(spec)) return catalog.profile(spec);
    if (auto slash = spec.find('/'); slash != std::string::npos) {
      return computed(spec.substr(0, slash), spec.substr(slash + 1));
    }
    if (is_gpu(spec)) {
      if (!default_model) throw ConfigError("GPU '" + spec + "' given without a model");
      return computed(spec, *default_model);
    }
    throw ConfigError("unknown profile or GPU '" + spec + "'");
  }

  GpuProfile primary() const {
    if (config.profile) return resolve(*config.profile, config.model);
    if (config.gpu && config.model) return computed(*config.gpu, *config.model);
    throw ConfigError("no profile selected: set --profile, or --gpu and --model");
  }

  ContextCdf workload() const {
    const auto& w = config.workload;
    switch (w.kind) {
      case WorkloadSource::Kind::kNone:
        throw ConfigError("no workload: set --trace, --cdf or --archetype");
      case WorkloadSource::Kind::kTrace: {
        std::ifstream in(w.path);
        if (!in) throw IngestionError("cannot open trace '" + w.path + "'", 0);
        IngestOptions opt;
        opt.default_output_tokens = config.default_output_tokens;
        opt.label = w.path;
        return ingest_trace(in, opt);
      }
      case WorkloadSource::Kind::kCdfFile:
        return cdf_from_json(read_json_file(w.path, "CDF file"));
      case WorkloadSource::Kind::kArchetype: {
        ArchetypeParams p = ArchetypeParams::defaults(w.archetype);
        const json& j = w.params;
        io_detail::read_opt(j, "bulk_median", p.bulk_median);
        io_detail::read_opt(j, "bulk_sigma", p.bulk_sigma);
        io_detail::read_opt(j, "tail_median", p.tail_median);
        io_detail::read_opt(j, "tail_sigma", p.tail_sigma);
        if (j.contains("tail_weight")) p.tail_weight = j.at("tail_weight").get<double>();
        io_detail::read_opt(j, "output_median", p.output_median);
        io_detail::read_opt(j, "output_sigma", p.output_sigma);
        io_detail::read_opt(j, "max_len", p.max_len);
        if (j.contains("constraint")) {
          p.constraint = {j.at("constraint").at("length").get<std::int64_t>(),
                          j.at("constraint").at("prob").get<double>()};
        }
        if (j.contains("p99_target")) {
          const auto& v = j.at("p99_target");
          p.p99_target = v.is_null() ? std::nullopt : std::optional<std::int64_t>(v.get<std::int64_t>());
        }
        try {
          return synth_archetype(w.archetype, p);
        } catch (const DomainError& e) {
          throw ConfigError(std::string("archetype: ") + e.what());
        }
      }
    }
    throw ConfigError("bad workload source");
  }
};

inline json profile_tag(const GpuProfile& p) {
  return json{{"profile", p.name},
              {"power_quality", std::string(to_string(p.power_quality()))},
              {"w_quality", std::string(to_string(p.w_quality))}};
}

inline void add_tag(Report& r, const GpuProfile& p) {
  const json t = profile_tag(p);
  for (const auto& e : r.tags) {
    if (e == t) return;
  }
  r.tags.push_back(t);
}

inline Report new_report(const std::string& command, const Context& ctx) {
  Report r;
  r.command = command;
  r.config = to_json_value(ctx.config);
  return r;
}

inline std::string w_flag(const GpuProfile& p) { return std::string(to_string(p.w_quality)); }

// ---------------------------------------------------------------------------
// Commands

inline Report cmd_sweep_context(const Context& ctx) {
  const GpuProfile p = ctx.primary();
  if (ctx.config.contexts.empty()) throw ConfigError("sweep-context: empty context list");
  const auto sweep = context_sweep(p, ctx.config.contexts);
  Report r = new_report("sweep-context", ctx);
  add_tag(r, p);

  Table t{"Context sweep: " + p.name + " (" + std::string(to_string(p.power_quality())) + ")",
          {{"Context", 0, true},
           {"n_max", 0},
           {"P_sat (W)", 0},
           {"tok/W", 2},
           {"tok/s", 0},
           {"tau (ms)", 2},
           {"W flag", 0}},
          {}};
  for (const auto& op : sweep) {
    t.add({op.ctx_window, op.n_max, op.power, op.tok_per_watt, op.throughput,
           decode_iteration_latency(p, op.n_active, op.l_mean), w_flag(p)});
  }
  r.tables.push_back(std::move(t));

  if (sweep.size() >= 2) {
    try {
      const auto ratios = halving_ratios(sweep);
      Table h{"Halving ratios", {{"From", 0, true}, {"To", 0, true}, {"tok/W ratio", 3}}, {}};
      for (std::size_t i = 0; i < ratios.size(); ++i) {
        h.add({sweep[i].ctx_window, sweep[i + 1].ctx_window, ratios[i]});
      }
      r.tables.push_back(std::move(h));
    } catch (const DomainError&) {
      r.notes.push_back("halving ratios omitted: windows are not a doubling ladder");
    }
  }
  return r;
}

inline Report compare_generations_report(const Context& ctx) {
  const auto& cfg = ctx.config;
  std::vector<std::string> subjects = cfg.subjects;
  std::optional<std::string> model = cfg.model;
  if (subjects.empty()) {
    for (const auto& g : ctx.catalog.gpus) subjects.push_back(g.name);
    if (!model) model = "Llama-3.1-70B";
  }
  std::vector<GpuProfile> profiles;
  for (const auto& s : subjects) profiles.push_back(ctx.resolve(s, model));
  if (profiles.size() < 2) throw ConfigError("compare generations: need at least two subjects");
  for (const auto& p : profiles) {
    if (p.model.name != profiles.front().model.name) {
      throw ConfigError("compare generations: subjects serve different models ('" + profiles.front().model.name +
                        "' and '" + p.model.name + "')");
    }
  }
  const auto cmp = compare_generations(profiles, cfg.context);
  Report r = new_report("compare", ctx);
  Table t{"GPU generations: " + profiles.front().model.name + " at " + report::context_label(cfg.context),
          {{"GPU", 0},
           {"Profile", 0},
           {"Quality", 0},
           {"TDP (W)", 0},
           {"P_idle", 0},
           {"W (ms)", 2},
           {"W flag", 0},
           {"n_max", 0},
           {"P_sat (W)", 0},
           {"tok/W", 2},
           {"tok/s", 0},
           {"$/hr", 1},
           {"tok/$ (M)", 3}},
          {}};
  for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
    const auto& s = cmp.rows[i];
    add_tag(r, profiles[i]);
    t.add({s.gpu, s.profile, std::string(to_string(s.quality)), s.tdp_w, s.p_idle, s.w_ms,
           std::string(to_string(s.w_quality)), s.point.n_max, s.point.power, s.point.tok_per_watt,
           s.point.throughput, s.cost_per_hour,
           s.tok_per_dollar ? Cell{*s.tok_per_dollar / 1e6} : Cell{}});
  }
  r.tables.push_back(std::move(t));
  Table m{"tok/W multiplier vs " + cmp.rows.front().profile, {{"Profile", 0}, {"Multiplier", 2}}, {}};
  for (std::size_t j = 0; j < cmp.rows.size(); ++j) m.add({cmp.rows[j].profile, cmp.multiplier[0][j]});
  r.tables.push_back(std::move(m));
  return r;
}

inline Report compare_models_report(const Context& ctx) {
  const auto& cfg = ctx.config;
  std::vector<std::string> subjects = cfg.subjects;
  if (subjects.empty()) {
    for (const auto& m : ctx.catalog.models) subjects.push_back(m.name);
  }
  if (subjects.size() < 2) throw ConfigError("compare models: need at least two subjects");
  const std::string gpu = cfg.gpu.value_or("H100-SXM5");
  Report r = new_report("compare", ctx);
  Table t{"Models on " + gpu + " at " + report::context_label(cfg.context),
          {{"Model", 0},
           {"TP", 0},
           {"KV sharding", 0},
           {"W (ms)", 2},
           {"W flag", 0},
           {"n_max", 0},
           {"tok/s", 0},
           {"tok/W", 2},
           {"Status", 0}},
          {}};
  for (const auto& s : subjects) {
    GpuProfile p;
    if (ctx.catalog.has_profile(s)) {
      p = ctx.catalog.profile(s);
    } else {
      const ModelSpec& m = ctx.catalog.model(s);
      try {
        p = ctx.computed(gpu, m.name);
      } catch (const InfeasibleModel& e) {
        t.add({m.name, m.tp, std::string(to_string(cfg.sharding)), Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
               std::string("infeasible: weights exceed VRAM")});
        continue;
      }
    }
    if (p.gpu.name != gpu) {
      throw ConfigError("compare models: subject '" + s + "' runs on '" + p.gpu.name + "', not '" + gpu + "'");
    }
    add_tag(r, p);
    const auto op = context_sweep(p, {cfg.context}).front();
    const bool clamped = p.kv_token_budget == 0 && p.nmax_floor > 0;
    t.add({p.model.name, p.model.tp, std::string(to_string(p.sharding)), p.w_ms, w_flag(p), op.n_max,
           op.throughput, op.tok_per_watt, std::string(clamped ? "clamped to n_max=1" : "ok")});
  }
  r.tables.push_back(std::move(t));
  return r;
}

inline Report compare_routing_report(const Context& ctx) {
  const auto& cfg = ctx.config;
  std::vector<RoutingSubject> subjects = cfg.routing;
  if (subjects.empty()) {
    for (const auto& s : cfg.subjects) {
      RoutingSubject rs;
      const auto at = s.rfind('@');
      try {
        if (at == std::string::npos) {
          rs.ctx_window = std::stoll(s);
        } else {
          rs.profile = s.substr(0, at);
          rs.ctx_window = std::stoll(s.substr(at + 1));
        }
      } catch (const std::exception&) {
        throw ConfigError("routing subject '" + s + "' must be WINDOW or PROFILE@WINDOW");
      }
      subjects.push_back(rs);
    }
  }
  if (subjects.empty()) subjects = {{"short", "", 8192}, {"long", "", 65536}};
  if (subjects.size() < 2) throw ConfigError("compare routing: need at least two subjects");
  Report r = new_report("compare", ctx);
  Table t{"Routing comparison at rho = " + report::format_double(cfg.rho, 2),
          {{"Pool", 0},
           {"Profile", 0},
           {"Model", 0},
           {"Context", 0, true},
           {"n_max", 0},
           {"n_active", 0},
           {"P (W)", 0},
           {"tok/W", 2},
           {"W flag", 0}},
          {}};
  for (const auto& s : subjects) {
    const GpuProfile p = s.profile.empty() ? ctx.primary() : ctx.resolve(s.profile, cfg.model);
    add_tag(r, p);
    const auto op = utilization_point(p, s.ctx_window, cfg.rho);
    const std::string label =
        s.label.empty() ? p.model.name + "@" + report::context_label(s.ctx_window) : s.label;
    t.add({label, p.name, p.model.name, s.ctx_window, op.n_max, static_cast<std::int64_t>(op.n_active), op.power,
           op.tok_per_watt, w_flag(p)});
  }
  r.tables.push_back(std::move(t));
  return r;
}

inline Report cmd_compare(const Context& ctx) {
  const auto& what = ctx.config.compare_what;
  if (what == "generations") return compare_generations_report(ctx);
  if (what == "models") return compare_models_report(ctx);
  if (what == "routing") return compare_routing_report(ctx);
  throw ConfigError("unknown comparison '" + what + "' (generations, models, routing)");
}

inline Table pools_table(const FleetPlan& plan, const std::string& title) {
  Table t{title,
          {{"Pool", 0},
           {"Profile", 0},
           {"Window", 0, true},
           {"lambda (req/s)", 2},
           {"Mean output", 1},
           {"Instances", 0},
           {"rho", 3},
           {"n_active", 1},
           {"Power (kW)", 2},
           {"tok/s", 0},
           {"tok/W", 2}},
          {}};
  for (const auto& p : plan.pools) {
    t.add({p.config.label, p.config.profile.name, p.config.ctx_window, p.config.lam, p.config.cdf.mean_output_len(),
           p.instances, p.point.rho, p.point.n_active_mean, p.point.pool_power_kw, p.point.pool_token_rate,
           p.point.tok_per_watt()});
  }
  return t;
}

inline std::vector<Cell> topology_cells(const Topology& t) {
  std::vector<Cell> c{std::string(to_string(t.kind))};
  if (t.boundary) {
    c.push_back(*t.boundary);
    c.push_back(t.gamma);
    c.push_back(t.short_window());
  } else {
    c.insert(c.end(), {Cell{}, Cell{}, Cell{}});
  }
  return c;
}

inline Report cmd_plan(const Context& ctx) {
  const GpuProfile p = ctx.primary();
  const ContextCdf w = ctx.workload();
  const auto& cfg = ctx.config;
  const FleetPlan plan = plan_topology(cfg.topology, w, p, cfg.arrival_rate, cfg.slo);
  Report r = new_report("plan", ctx);
  add_tag(r, p);
  r.tables.push_back(pools_table(plan, "Pools"));
  Table f{"Fleet",
          {{"Topology", 0},
           {"Boundary", 0, true},
           {"gamma", 1},
           {"Short window", 0, true},
           {"Instances", 0},
           {"Power (kW)", 2},
           {"tok/W", 3}},
          {}};
  auto row = topology_cells(cfg.topology);
  row.insert(row.end(), {plan.total_instances(), plan.fleet_power_kw, plan.fleet_tok_per_watt});
  f.add(std::move(row));
  r.tables.push_back(std::move(f));
  r.notes.push_back("SLO: " + cfg.slo.metric + " P" + report::format_double(cfg.slo.percentile * 100.0, 0) +
                    " <= " + report::format_double(cfg.slo.bound_ms, 0) + " ms");
  r.data["plan"] = plan_to_json(plan);
  return r;
}

struct OptimizeRun {
  FleetPlan homogeneous;
  OptimizationResult result;
};

inline OptimizeRun run_optimize(const Context& ctx, const GpuProfile& p, const ContextCdf& w) {
  const auto& cfg = ctx.config;
  const std::int64_t lw = cfg.topology.long_window;
  FleetPlan homo = plan_topology(Topology::homogeneous(lw), w, p, cfg.arrival_rate, cfg.slo);
  OptimizationResult res = optimize(w, p, cfg.arrival_rate, cfg.slo, cfg.boundaries, cfg.gammas, lw);
  return {std::move(homo), std::move(res)};
}

inline Table candidates_table(const OptimizeRun& run, const std::string& title) {
  Table t{title,
          {{"Rank", 0},
           {"Topology", 0},
           {"Boundary", 0, true},
           {"gamma", 1},
           {"Short window", 0, true},
           {"Instances", 0},
           {"Power (kW)", 2},
           {"tok/W", 3},
           {"vs Homo", 2},
           {"Status", 0}},
          {}};
  const double base = run.homogeneous.fleet_tok_per_watt;
  t.add({std::string("-"), std::string("homogeneous"), Cell{}, Cell{}, Cell{}, run.homogeneous.total_instances(),
         run.homogeneous.fleet_power_kw, base, 1.0, std::string("baseline")});
  std::int64_t rank = 1;
  for (const auto& c : run.result.ranked) {
    std::vector<Cell> row{rank++};
    for (auto& x : topology_cells(c.topology)) row.push_back(x);
    if (c.plan) {
      row.insert(row.end(), {c.plan->total_instances(), c.plan->fleet_power_kw, c.plan->fleet_tok_per_watt,
                             c.plan->fleet_tok_per_watt / base, std::string("ok")});
    } else {
      row.insert(row.end(), {Cell{}, Cell{}, Cell{}, Cell{}, "infeasible: " + c.error});
    }
    t.add(std::move(row));
  }
  return t;
}

inline Report cmd_optimize(const Context& ctx) {
  const GpuProfile p = ctx.primary();
  const ContextCdf w = ctx.workload();
  Report r = new_report("optimize", ctx);
  add_tag(r, p);
  const OptimizeRun base = run_optimize(ctx, p, w);
  r.tables.push_back(candidates_table(base, "Candidates: " + p.name));
  r.tables.push_back(pools_table(base.result.plan, "Best plan: " + p.name));
  r.data["base"] = json{{"profile", p.name},
                        {"homogeneous", plan_to_json(base.homogeneous)},
                        {"best", base.result.best},
                        {"plan", plan_to_json(base.result.plan)}};

  if (ctx.config.compare_profile) {
    const GpuProfile q = ctx.resolve(*ctx.config.compare_profile, p.model.name);
    if (q.model.name != p.model.name) {
      throw ConfigError("optimize: compare profile serves '" + q.model.name + "', not '" + p.model.name + "'");
    }
    add_tag(r, q);
    const OptimizeRun other = run_optimize(ctx, q, w);
    r.tables.push_back(candidates_table(other, "Candidates: " + q.name));
    r.tables.push_back(pools_table(other.result.plan, "Best plan: " + q.name));
    const GainDecomposition d =
        gain_decomposition(base.homogeneous.fleet_tok_per_watt, base.result.plan.fleet_tok_per_watt,
                           other.homogeneous.fleet_tok_per_watt, other.result.plan.fleet_tok_per_watt);
    const double topo_new = other.result.plan.fleet_tok_per_watt / other.homogeneous.fleet_tok_per_watt;
    const double dev = multiplicativity_check(d);
    Table g{"Gain decomposition vs " + p.name + " homogeneous",
            {{"delta_topo (" + p.name + ")", 3},
             {"delta_topo (" + q.name + ")", 3},
             {"delta_gen", 3},
             {"delta_combined", 3},
             {"topo x gen", 3},
             {"Deviation", 4}},
            {}};
    g.add({d.delta_topo, topo_new, d.delta_gen, d.delta_combined, d.delta_topo * d.delta_gen, dev});
    r.tables.push_back(std::move(g));
    r.data["compare"] = json{{"profile", q.name},
                             {"homogeneous", plan_to_json(other.homogeneous)},
                             {"best", other.result.best},
                             {"plan", plan_to_json(other.result.plan)}};
    r.data["gain"] = json{{"delta_topo", d.delta_topo},
                          {"delta_topo_compare", topo_new},
                          {"delta_gen", d.delta_gen},
                          {"delta_combined", d.delta_combined},
                          {"multiplicativity_deviation", dev}};
  }
  return r;
}

inline Table workload_table(const ContextCdf& cdf) {
  Table t{"Workload: " + cdf.label(),
          {{"Mean context", 0},
           {"Mean output", 1},
           {"p50", 0},
           {"p90", 0},
           {"p99", 0},
           {"P[<=4K]", 4},
           {"P[<=8K]", 4},
           {"Archetype", 0}},
          {}};
  t.add({cdf.mean_length(), cdf.mean_output_len(), cdf.quantile(0.5), cdf.quantile(0.9), cdf.quantile(0.99),
         cdf.prob_le(4096.0), cdf.prob_le(8192.0), std::string(to_string(classify_archetype(cdf)))});
  return t;
}

inline Report cmd_ingest_trace(const Context& ctx, const std::optional<std::string>& cdf_out) {
  if (ctx.config.workload.kind != WorkloadSource::Kind::kTrace) {
    throw ConfigError("ingest-trace: no trace given (--trace)");
  }
  const ContextCdf cdf = ctx.workload();
  Report r = new_report("ingest-trace", ctx);
  r.tables.push_back(workload_table(cdf));
  r.data["cdf"] = cdf_to_json(cdf);
  if (cdf_out) {
    std::ofstream out(*cdf_out);
    if (!out) throw ConfigError("cannot write '" + *cdf_out + "'");
    out << cdf_to_json(cdf).dump(2) << '\n';
  }
  return r;
}

inline Report cmd_classify(const Context& ctx) {
  const ContextCdf cdf = ctx.workload();
  Report r = new_report("classify", ctx);
  r.tables.push_back(workload_table(cdf));
  r.data["archetype"] = std::string(to_string(classify_archetype(cdf)));
  return r;
}

inline Report cmd_catalog(const Context& ctx) {
  Report r = new_report("catalog", ctx);
  Table g{"GPUs",
          {{"GPU", 0},
           {"TDP (W)", 0},
           {"VRAM (GB)", 0},
           {"BW (TB/s)", 2},
           {"P_idle", 0},
           {"P_nom", 0},
           {"k", 1},
           {"x0", 2},
           {"$/hr", 1},
           {"Quality", 0},
           {"BW eff", 3}},
          {}};
  for (const auto& x : ctx.catalog.gpus) {
    g.add({x.name, x.tdp_w, x.vram_gb, x.mem_bw_bytes_per_s / 1e12, x.power.p_idle, x.power.p_nom(), x.power.k,
           x.power.x0, x.cost_per_hour, std::string(to_string(x.quality)), x.bw_efficiency});
  }
  Table m{"Models",
          {{"Model", 0},
           {"Params (B)", 1},
           {"Active (B)", 1},
           {"Layers", 0},
           {"KV heads", 0},
           {"Head dim", 0},
           {"Bytes/param", 1},
           {"TP", 0}},
          {}};
  for (const auto& x : ctx.catalog.models) {
    m.add({x.name, x.total_params / 1e9, x.active_params ? Cell{*x.active_params / 1e9} : Cell{}, x.layers,
           x.kv_heads, x.head_dim, x.bytes_per_param, x.tp});
  }
  Table p{"Profiles",
          {{"Profile", 0},
           {"GPU", 0},
           {"Model", 0},
           {"W (ms)", 2},
           {"H0 (ms)", 4},
           {"KV budget", 0},
           {"x0", 3},
           {"W flag", 0}},
          {}};
  for (const auto& x : ctx.catalog.profiles) {
    p.add({x.name, x.gpu.name, x.model.name, x.w_ms, x.h0_ms, x.kv_token_budget, x.power.x0, w_flag(x)});
    add_tag(r, x);
  }
  r.tables = {std::move(g), std::move(m), std::move(p)};
  r.data["catalog"] = catalog_to_json(ctx.catalog);
  return r;
}

// ---------------------------------------------------------------------------
// Entry point

/// Flag values; each overrides the config file when given.
struct Flags {
  std::string config_path;
  std::optional<std::string> format, out, profile, gpu, model, compare_profile, sharding;
  std::optional<double> bw_efficiency, vram_reserve_gib, dispatch_ms, lambda, slo_ms, slo_percentile, rho, gamma;
  bool clamp_infeasible = false;
  std::optional<std::string> trace, cdf, archetype;
  std::optional<std::int64_t> output_tokens, context, boundary, long_window;
  std::optional<std::string> topology;
  std::vector<std::int64_t> contexts, boundaries;
  std::vector<double> gammas;
  std::optional<std::string> what;
  std::vector<std::string> subjects;
  std::optional<std::string> cdf_out;
};

inline void apply_flags(const Flags& f, RunConfig& c) {
  if (f.format) c.format = parse_format(*f.format);
  if (f.profile) c.profile = f.profile;
  if (f.gpu) c.gpu = f.gpu;
  if (f.model) c.model = f.model;
  if (f.compare_profile) c.compare_profile = f.compare_profile;
  if (f.sharding) c.sharding = parse_sharding(*f.sharding);
  if (f.bw_efficiency) c.bw_efficiency = f.bw_efficiency;
  if (f.vram_reserve_gib) c.vram_reserve_gib = *f.vram_reserve_gib;
  if (f.dispatch_ms) c.dispatch_ms = *f.dispatch_ms;
  if (f.clamp_infeasible) c.clamp_infeasible = true;
  const int sources = static_cast<int>(f.trace.has_value()) + static_cast<int>(f.cdf.has_value()) +
                      static_cast<int>(f.archetype.has_value());
  if (sources > 1) throw ConfigError("give only one of --trace, --cdf, --archetype");
  if (f.trace) c.workload = {WorkloadSource::Kind::kTrace, *f.trace, {}, json::object()};
  if (f.cdf) c.workload = {WorkloadSource::Kind::kCdfFile, *f.cdf, {}, json::object()};
  if (f.archetype) c.workload = {WorkloadSource::Kind::kArchetype, {}, parse_archetype(*f.archetype), json::object()};
  if (f.output_tokens) c.default_output_tokens = f.output_tokens;
  if (f.lambda) c.arrival_rate = *f.lambda;
  if (f.slo_ms) c.slo.bound_ms = *f.slo_ms;
  if (f.slo_percentile) c.slo.percentile = *f.slo_percentile;
  if (f.rho) c.rho = *f.rho;
  if (f.context) c.context = *f.context;
  if (!f.contexts.empty()) c.contexts = f.contexts;
  if (f.topology) c.topology.kind = parse_topology_kind(*f.topology);
  if (f.boundary) c.topology.boundary = f.boundary;
  if (f.gamma) c.topology.gamma = *f.gamma;
  if (f.long_window) c.topology.long_window = *f.long_window;
  if (c.topology.kind == TopologyKind::kHomogeneous) c.topology.boundary.reset();
  if (!f.boundaries.empty()) c.boundaries = f.boundaries;
  if (!f.gammas.empty()) c.gammas = f.gammas;
  if (f.what) c.compare_what = *f.what;
  if (!f.subjects.empty()) {
    c.subjects = f.subjects;
    c.routing.clear();
  }
}

inline void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "Config file (JSON); FLEETWATT_CONFIG is the fallback");
  sub->add_option("--format", f.format, "Output format: table, csv, json");
  sub->add_option("--out", f.out, "Write the report to this path instead of stdout");
  sub->add_option("--profile", f.profile, "Catalog profile name, GPU/MODEL, or GPU (with --model)");
  sub->add_option("--gpu", f.gpu, "GPU name for computed profiles");
  sub->add_option("--model", f.model, "Model name for computed profiles");
  sub->add_option("--bw-efficiency", f.bw_efficiency, "Achieved fraction of nominal HBM bandwidth");
  sub->add_option("--vram-reserve-gib", f.vram_reserve_gib, "Per-GPU VRAM held back from the KV cache");
  sub->add_option("--kv-sharding", f.sharding, "tp_sharded or replicated");
  sub->add_option("--dispatch-ms", f.dispatch_ms, "Extra per-iteration MoE dispatch time");
  sub->add_flag("--clamp-infeasible", f.clamp_infeasible, "Floor n_max at 1 when weights exceed VRAM");
}

inline void add_workload_options(CLI::App* sub, Flags& f) {
  sub->add_option("--trace", f.trace, "JSONL trace with prompt_tokens/output_tokens");
  sub->add_option("--cdf", f.cdf, "Context CDF file (JSON)");
  sub->add_option("--archetype", f.archetype, "short_dominant, mixed or long_dominant");
  sub->add_option("--output-tokens", f.output_tokens, "Output length for traces without output_tokens");
}

inline void add_fleet_options(CLI::App* sub, Flags& f) {
  sub->add_option("--lambda", f.lambda, "Arrival rate (req/s)");
  sub->add_option("--slo-ms", f.slo_ms, "TTFT bound (ms)");
  sub->add_option("--slo-percentile", f.slo_percentile, "TTFT percentile, e.g. 0.99");
  sub->add_option("--long-window", f.long_window, "Long pool context window");
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fleetwatt: tokens-per-watt planning for LLM inference fleets", "fleetwatt"};
  app.require_subcommand(1);
  Flags f;

  auto* sweep = app.add_subcommand("sweep-context", "tok/W and n_max across context windows");
  add_common_options(sweep, f);
  sweep->add_option("--contexts", f.contexts, "Context windows")->delimiter(',');

  auto* compare = app.add_subcommand("compare", "Compare GPU generations, models or routing pools");
  add_common_options(compare, f);
  compare->add_option("--what", f.what, "generations, models or routing");
  compare->add_option("--subjects", f.subjects, "Profiles/GPUs, models, or WINDOW / PROFILE@WINDOW")
      ->delimiter(',');
  compare->add_option("--context", f.context, "Context window for generation and model comparisons");
  compare->add_option("--rho", f.rho, "Utilization for routing comparisons");

  auto* plan = app.add_subcommand("plan", "Size a fleet for one topology");
  add_common_options(plan, f);
  add_workload_options(plan, f);
  add_fleet_options(plan, f);
  plan->add_option("--topology", f.topology, "homogeneous, two_pool or fleet_opt");
  plan->add_option("--boundary", f.boundary, "Split boundary (tokens)");
  plan->add_option("--gamma", f.gamma, "Short-pool window multiplier");

  auto* opt = app.add_subcommand("optimize", "Grid-search topologies for the best fleet tok/W");
  add_common_options(opt, f);
  add_workload_options(opt, f);
  add_fleet_options(opt, f);
  opt->add_option("--boundaries", f.boundaries, "Boundary grid")->delimiter(',');
  opt->add_option("--gammas", f.gammas, "Gamma grid")->delimiter(',');
  opt->add_option("--compare-profile", f.compare_profile, "Second profile or GPU for the gain decomposition");

  auto* ingest = app.add_subcommand("ingest-trace", "Build a context CDF from a trace");
  add_common_options(ingest, f);
  add_workload_options(ingest, f);
  ingest->add_option("--cdf-out", f.cdf_out, "Also write the CDF file here");

  auto* classify = app.add_subcommand("classify", "Classify a workload by short-context share");
  add_common_options(classify, f);
  add_workload_options(classify, f);

  auto* cat = app.add_subcommand("catalog", "Show the merged GPU, model and profile catalog");
  add_common_options(cat, f);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "fleetwatt: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    Context ctx;
    std::string config_path = f.config_path;
    if (config_path.empty()) {
      if (const char* env = std::getenv("FLEETWATT_CONFIG"); env && *env) config_path = env;
    }
    if (!config_path.empty()) apply_config_json(read_json_file(config_path, "config"), ctx.config);
    apply_flags(f, ctx.config);
    try {
      const json& overrides = ctx.config.catalog;
      ctx.catalog = read_catalog(overrides.is_string() ? read_json_file(overrides.get<std::string>(), "catalog")
                                                       : overrides,
                                 catalog::builtin());
    } catch (const DomainError& e) {
      throw ConfigError(std::string("catalog: ") + e.what());
    }

    Report r;
    if (sweep->parsed()) {
      r = cmd_sweep_context(ctx);
    } else if (compare->parsed()) {
      r = cmd_compare(ctx);
    } else if (plan->parsed()) {
      r = cmd_plan(ctx);
    } else if (opt->parsed()) {
      r = cmd_optimize(ctx);
    } else if (ingest->parsed()) {
      r = cmd_ingest_trace(ctx, f.cdf_out);
    } else if (classify->parsed()) {
      r = cmd_classify(ctx);
    } else {
      r = cmd_catalog(ctx);
    }

    const std::string text = report::render(r, ctx.config.format);
    if (f.out) {
      std::ofstream file(*f.out);
      if (!file) throw ConfigError("cannot write '" + *f.out + "'");
      file << text;
    } else {
      out << text;
    }
    return kOk;
  } catch (const IngestionError& e) {
    err << "fleetwatt: ingestion error: " << e.what() << '\n';
    return kIngestionError;
  } catch (const InfeasibleModel& e) {
    err << "fleetwatt: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const SizingError& e) {
    err << "fleetwatt: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const OptimizationError& e) {
    err << "fleetwatt: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const CapacityExceeded& e) {
    err << "fleetwatt: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ConfigError& e) {
    err << "fleetwatt: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "fleetwatt: config error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace fleetwatt::cli
