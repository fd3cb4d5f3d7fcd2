// Copyright 2026 The LGCP Authors.
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

#include "lgcp/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <thread>
#include <tuple>

#include "lgcp/error.h"
#include "lgcp/io.h"
#include "lgcp/rng.h"

namespace lgcp {
namespace {

using nlohmann::json;

constexpr std::uint64_t kTagScenarioConf = 0x636f6e66;
constexpr std::uint64_t kTagLink = 0x6c696e6b;
constexpr std::uint64_t kTagGroups = 0x67727073;
constexpr std::uint64_t kTagSched = 0x73636864;
constexpr std::uint64_t kTagFull = 0x66756c6c;
constexpr std::uint64_t kTagCompare = 0x636d7072;

template <typename T>
std::vector<T> ScalarOrList(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

// Applies `fn` to every item of `obj`, rejecting keys outside `known`.
void ForEachKnown(const json& obj, const std::set<std::string>& known,
                  const std::string& where,
                  const std::function<void(const std::string&, const json&)>& fn) {
  if (!obj.is_object()) throw ParseError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) {
      throw ValidationError("unknown config key '" + where + "." + key + "'");
    }
    fn(key, value);
  }
}

void RunParallel(std::size_t jobs, int threads,
                 const std::function<void(std::size_t)>& fn) {
  std::size_t workers =
      threads > 0 ? static_cast<std::size_t>(threads)
                  : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

std::string Opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

// The latency identities every emitted LGCP row must satisfy.
std::string CheckReport(const ParadigmReport& r, double t_max_s) {
  if (r.feasible != (r.latency_s <= t_max_s)) return "feasibility flag mismatch";
  if (!r.breakdown) return {};
  const LatencyBreakdown& b = *r.breakdown;
  if (std::abs(b.t_delta + b.joint_latency - b.total) > 1e-9) {
    return "total != t_delta + joint latency";
  }
  if (std::abs(b.stage_sum() - b.total) > 1e-9) return "stage sum != total";
  return {};
}

void Record(PropertyCheck& check, bool ok, const std::string& what) {
  ++check.total;
  if (ok) {
    ++check.passed;
  } else if (check.failures.size() < 10) {
    check.failures.push_back(what);
  }
}

std::string CompletenessIssue(std::span<const Packet> input,
                              const Schedule& s) {
  std::multiset<std::tuple<int, int, int>> want, got;
  for (const Packet& p : input) want.insert({p.src, p.dst, p.area});
  for (const Packet& p : s.packets) got.insert({p.src, p.dst, p.area});
  return want == got ? std::string() : "placed packets differ from input";
}

std::string BoundsIssue(std::size_t n_packets, int z, const Schedule& s) {
  const int n = static_cast<int>(n_packets);
  const int lower = (n + z - 1) / z;
  if (s.makespan_slots < lower || s.makespan_slots > n) {
    return "makespan " + std::to_string(s.makespan_slots) + " outside [" +
           std::to_string(lower) + ", " + std::to_string(n) + "]";
  }
  return {};
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

// ---------------------------------------------------------------------------
// Configuration

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  if (name == "default") return c;
  if (name == "opv2v-like") {
    c.grid = GridSpec{};
    c.full_feature_bits = 2.16e6;
    c.channel = ChannelParams{};
    c.delta_g = {0.075};
    c.n_cavs = {2, 3, 4, 5, 6, 7};
    c.n_background = 10;
    c.t_max_ms = 100.0;
    return c;
  }
  throw ValidationError("unknown preset '" + name + "'");
}

ExperimentConfig apply_config_json(ExperimentConfig c, const json& doc) {
  try {
    ForEachKnown(
        doc,
        {"scenario", "grid", "n_background", "generator", "confidence",
         "channel", "fusion_model", "custom_fusion_flops", "messages",
         "full_feature_bits", "feature_bits", "slot_policy", "fixed_slot_ms",
         "priority_mode", "edge_compute_flops", "vehicle_mode", "delta_g",
         "n_cavs", "paradigms", "t_max_ms", "seeds", "out", "format",
         "detail", "threads", "verify", "compare"},
        "config", [&](const std::string& k, const json& v) {
          if (k == "scenario") {
            if (v.is_null()) {
              c.scenario_path.reset();
            } else {
              c.scenario_path = v.get<std::string>();
            }
          } else if (k == "grid") {
            ForEachKnown(v, {"width_m", "height_m", "cell_w", "cell_h", "origin"},
                         "grid", [&](const std::string& g, const json& x) {
                           if (g == "width_m") c.grid.width_m = x.get<double>();
                           if (g == "height_m") c.grid.height_m = x.get<double>();
                           if (g == "cell_w") c.grid.cell_w = x.get<double>();
                           if (g == "cell_h") c.grid.cell_h = x.get<double>();
                           if (g == "origin") {
                             c.grid.origin = {x.at("x").get<double>(),
                                              x.at("y").get<double>()};
                           }
                         });
          } else if (k == "n_background") {
            c.n_background = v.get<int>();
          } else if (k == "generator") {
            ForEachKnown(v, {"cav_compute_flops", "lane_width_m"}, "generator",
                         [&](const std::string& g, const json& x) {
                           if (g == "cav_compute_flops") {
                             c.generator.cav_compute_flops = x.get<double>();
                           } else {
                             c.generator.lane_width_m = x.get<double>();
                           }
                         });
          } else if (k == "confidence") {
            ForEachKnown(
                v, {"base", "decay_length_m", "occlusion_penalty", "noise_sigma"},
                "confidence", [&](const std::string& g, const json& x) {
                  if (g == "base") c.confidence.base = x.get<double>();
                  if (g == "decay_length_m") c.confidence.decay_length_m = x.get<double>();
                  if (g == "occlusion_penalty") c.confidence.occlusion_penalty = x.get<double>();
                  if (g == "noise_sigma") c.confidence.noise_sigma = x.get<double>();
                });
          } else if (k == "channel") {
            json merged = channel_to_json(c.channel);
            ForEachKnown(v, [&] {
              std::set<std::string> keys;
              for (const auto& [key, unused] : merged.items()) keys.insert(key);
              return keys;
            }(), "channel", [&](const std::string& g, const json& x) {
              merged[g] = x;
            });
            c.channel = channel_from_json(merged);
          } else if (k == "fusion_model") {
            c.fusion_model = v.get<std::string>();
          } else if (k == "custom_fusion_flops") {
            c.custom_fusion_flops = v.get<double>();
          } else if (k == "messages") {
            ForEachKnown(v, {"d_init", "d_info", "d_ts", "d_rep", "d_g"},
                         "messages", [&](const std::string& g, const json& x) {
                           if (g == "d_init") c.messages.d_init = x.get<double>();
                           if (g == "d_info") c.messages.d_info = x.get<double>();
                           if (g == "d_ts") c.messages.d_ts = x.get<double>();
                           if (g == "d_rep") c.messages.d_rep = x.get<double>();
                           if (g == "d_g") c.messages.d_g = x.get<double>();
                         });
          } else if (k == "full_feature_bits") {
            c.full_feature_bits = v.get<double>();
          } else if (k == "feature_bits") {
            if (v.is_null()) {
              c.feature_bits.reset();
            } else {
              c.feature_bits = v.get<double>();
            }
          } else if (k == "slot_policy") {
            const auto s = v.get<std::string>();
            if (s == "packet") {
              c.slot_policy = SlotPolicy::kPacketDuration;
            } else if (s == "fixed") {
              c.slot_policy = SlotPolicy::kFixed;
            } else {
              throw ValidationError("slot_policy must be packet or fixed");
            }
          } else if (k == "fixed_slot_ms") {
            c.fixed_slot_ms = v.get<double>();
          } else if (k == "priority_mode") {
            const auto s = v.get<std::string>();
            if (s == "static") {
              c.priority_mode = PriorityMode::kStatic;
            } else if (s == "dynamic") {
              c.priority_mode = PriorityMode::kDynamic;
            } else {
              throw ValidationError("priority_mode must be static or dynamic");
            }
          } else if (k == "edge_compute_flops") {
            c.edge_compute_flops = v.get<double>();
          } else if (k == "vehicle_mode") {
            const auto s = v.get<std::string>();
            if (s == "unicast") {
              c.vehicle_mode = VehicleMode::kUnicast;
            } else if (s == "broadcast") {
              c.vehicle_mode = VehicleMode::kBroadcast;
            } else {
              throw ValidationError("vehicle_mode must be unicast or broadcast");
            }
          } else if (k == "delta_g") {
            c.delta_g = ScalarOrList<double>(v);
          } else if (k == "n_cavs") {
            c.n_cavs = ScalarOrList<int>(v);
          } else if (k == "paradigms") {
            c.paradigms.clear();
            for (const auto& name : ScalarOrList<std::string>(v)) {
              auto p = parse_paradigm(name);
              if (!p) throw ValidationError("unknown paradigm '" + name + "'");
              c.paradigms.push_back(*p);
            }
          } else if (k == "t_max_ms") {
            c.t_max_ms = v.get<double>();
          } else if (k == "seeds") {
            c.seeds = ScalarOrList<std::uint64_t>(v);
          } else if (k == "out") {
            c.out = v.get<std::string>();
          } else if (k == "format") {
            c.format = v.get<std::string>();
          } else if (k == "detail") {
            c.detail = v.get<bool>();
          } else if (k == "threads") {
            c.threads = v.get<int>();
          } else if (k == "verify") {
            ForEachKnown(v,
                         {"instances", "max_cavs", "max_areas", "max_packets",
                          "max_subchannels"},
                         "verify", [&](const std::string& g, const json& x) {
                           const int n = x.get<int>();
                           if (g == "instances") c.verify_instances = n;
                           if (g == "max_cavs") c.verify_max_cavs = n;
                           if (g == "max_areas") c.verify_max_areas = n;
                           if (g == "max_packets") c.verify_max_packets = n;
                           if (g == "max_subchannels") c.verify_max_subchannels = n;
                         });
          } else if (k == "compare") {
            ForEachKnown(v, {"n_cavs", "n_background"}, "compare",
                         [&](const std::string& g, const json& x) {
                           if (g == "n_cavs") c.compare_n_cavs = x.get<int>();
                           if (g == "n_background") {
                             c.compare_n_background = x.get<int>();
                           }
                         });
          }
        });
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  } catch (const InvalidArgumentError& e) {
    throw ValidationError(e.what());
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = c.scenario_path ? json(*c.scenario_path) : json();
  j["grid"] = {{"width_m", c.grid.width_m},
               {"height_m", c.grid.height_m},
               {"cell_w", c.grid.cell_w},
               {"cell_h", c.grid.cell_h},
               {"origin", {{"x", c.grid.origin.x}, {"y", c.grid.origin.y}}}};
  j["n_background"] = c.n_background;
  j["generator"] = {{"cav_compute_flops", c.generator.cav_compute_flops},
                    {"lane_width_m", c.generator.lane_width_m}};
  j["confidence"] = {{"base", c.confidence.base},
                     {"decay_length_m", c.confidence.decay_length_m},
                     {"occlusion_penalty", c.confidence.occlusion_penalty},
                     {"noise_sigma", c.confidence.noise_sigma}};
  j["channel"] = channel_to_json(c.channel);
  j["fusion_model"] = c.fusion_model;
  j["custom_fusion_flops"] = c.custom_fusion_flops;
  j["messages"] = {{"d_init", c.messages.d_init}, {"d_info", c.messages.d_info},
                   {"d_ts", c.messages.d_ts},     {"d_rep", c.messages.d_rep},
                   {"d_g", c.messages.d_g}};
  j["full_feature_bits"] = c.full_feature_bits;
  j["feature_bits"] = c.feature_bits ? json(*c.feature_bits) : json();
  j["slot_policy"] =
      c.slot_policy == SlotPolicy::kFixed ? "fixed" : "packet";
  j["fixed_slot_ms"] = c.fixed_slot_ms;
  j["priority_mode"] =
      c.priority_mode == PriorityMode::kDynamic ? "dynamic" : "static";
  j["edge_compute_flops"] = c.edge_compute_flops;
  j["vehicle_mode"] =
      c.vehicle_mode == VehicleMode::kBroadcast ? "broadcast" : "unicast";
  j["delta_g"] = c.delta_g;
  j["n_cavs"] = c.n_cavs;
  json paradigms = json::array();
  for (Paradigm p : c.paradigms) paradigms.push_back(paradigm_name(p));
  j["paradigms"] = paradigms;
  j["t_max_ms"] = c.t_max_ms;
  j["seeds"] = c.seeds;
  j["out"] = c.out;
  j["format"] = c.format;
  j["detail"] = c.detail;
  j["threads"] = c.threads;
  j["verify"] = {{"instances", c.verify_instances},
                 {"max_cavs", c.verify_max_cavs},
                 {"max_areas", c.verify_max_areas},
                 {"max_packets", c.verify_max_packets},
                 {"max_subchannels", c.verify_max_subchannels}};
  j["compare"] = {{"n_cavs", c.compare_n_cavs},
                  {"n_background", c.compare_n_background}};
  return j;
}

void validate_config(const ExperimentConfig& c) {
  if (c.delta_g.empty()) throw ValidationError("delta_g sweep is empty");
  for (double d : c.delta_g) {
    if (!(d >= 0.0 && d <= 1.0)) {
      throw ValidationError("delta_g value outside [0,1]: " + format_double(d));
    }
  }
  if (c.n_cavs.empty()) throw ValidationError("n_cavs sweep is empty");
  for (int n : c.n_cavs) {
    if (n < 1) throw ValidationError("n_cavs values must be >= 1");
  }
  if (c.seeds.empty()) throw ValidationError("seeds list is empty");
  if (c.paradigms.empty()) throw ValidationError("paradigm list is empty");
  if (c.n_background < 0) throw ValidationError("n_background must be >= 0");
  if (c.format != "csv" && c.format != "json") {
    throw ValidationError("format must be csv or json");
  }
  if (!(c.t_max_ms > 0.0)) throw ValidationError("t_max_ms must be positive");
  if (!(c.full_feature_bits > 0.0) ||
      (c.feature_bits && !(*c.feature_bits > 0.0))) {
    throw ValidationError("feature sizes must be positive");
  }
  if (!(c.fixed_slot_ms > 0.0)) throw ValidationError("fixed_slot_ms must be > 0");
  if (!(c.edge_compute_flops > 0.0)) {
    throw ValidationError("edge_compute_flops must be > 0");
  }
  if (c.verify_instances < 1) throw ValidationError("verify.instances must be >= 1");
  if (c.compare_n_cavs < 1 || c.compare_n_background < 0) {
    throw ValidationError("bad compare corpus size");
  }
  try {
    fusion_model_of(c);
    validate_channel(c.channel);
    validate_params(c.confidence);
    (void)RoiGrid::Build(c.grid.width_m, c.grid.height_m, c.grid.cell_w,
                         c.grid.cell_h, c.grid.origin);
  } catch (const InvalidArgumentError& e) {
    throw ValidationError(e.what());
  }
}

FusionCostModel fusion_model_of(const ExperimentConfig& c) {
  if (c.fusion_model == "custom") {
    if (!(c.custom_fusion_flops > 0.0)) {
      throw ValidationError("custom fusion model needs custom_fusion_flops > 0");
    }
    return {c.custom_fusion_flops};
  }
  if (auto preset = fusion_preset(c.fusion_model)) return *preset;
  throw ValidationError("unknown fusion model '" + c.fusion_model + "'");
}

LgcpConfig lgcp_config_of(const ExperimentConfig& c, double delta_g,
                          std::uint64_t link_seed) {
  LgcpConfig l;
  l.delta_g = delta_g;
  l.feature_bits = c.feature_bits;
  l.full_feature_bits = c.full_feature_bits;
  l.channel = c.channel;
  l.fusion = fusion_model_of(c);
  l.messages = c.messages;
  l.t_max_s = c.t_max_ms / 1000.0;
  l.slot_policy = c.slot_policy;
  l.fixed_slot_s = c.fixed_slot_ms / 1000.0;
  l.priority_mode = c.priority_mode;
  l.link_seed = link_seed;
  return l;
}

BaselineConfig baseline_config_of(const ExperimentConfig& c,
                                  std::uint64_t link_seed) {
  BaselineConfig b;
  b.full_feature_bits = c.full_feature_bits;
  b.channel = c.channel;
  b.fusion = fusion_model_of(c);
  b.messages = c.messages;
  b.t_max_s = c.t_max_ms / 1000.0;
  b.edge_compute_flops = c.edge_compute_flops;
  b.vehicle_mode = c.vehicle_mode;
  b.link_seed = link_seed;
  return b;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepInstance make_instance(const ExperimentConfig& c, std::uint64_t seed,
                            int n_cavs) {
  SweepInstance inst;
  inst.seed = seed;
  if (c.scenario_path) {
    inst.scenario = load_scenario(*c.scenario_path);
  } else {
    inst.scenario = generate_scenario(seed, n_cavs, c.n_background, c.grid,
                                      c.generator);
  }
  inst.n_cavs = static_cast<int>(inst.scenario.cavs.size());
  if (inst.scenario.confidence.source == ConfidenceSource::kFile) {
    std::filesystem::path path = inst.scenario.confidence.path;
    if (path.is_relative() && c.scenario_path) {
      path = std::filesystem::path(*c.scenario_path).parent_path() / path;
    }
    inst.confidence = load_confidence(path, inst.scenario);
  } else {
    inst.confidence = synthetic_confidence(
        inst.scenario, c.confidence,
        derive_seed({seed, static_cast<std::uint64_t>(inst.n_cavs),
                     kTagScenarioConf}));
  }
  inst.link_seed =
      derive_seed({seed, static_cast<std::uint64_t>(inst.n_cavs), kTagLink});
  return inst;
}

int SweepResult::failures() const {
  return static_cast<int>(std::count_if(
      rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); }));
}

SweepResult run_sweep(const ExperimentConfig& c) {
  validate_config(c);
  std::vector<int> counts = c.n_cavs;
  if (c.scenario_path) counts = {0};  // the file fixes the CAV count
  std::vector<std::pair<std::uint64_t, int>> jobs;
  for (std::uint64_t seed : c.seeds) {
    for (int n : counts) jobs.push_back({seed, n});
  }
  std::vector<std::vector<SweepRow>> out(jobs.size());
  const double t_max_s = c.t_max_ms / 1000.0;

  RunParallel(jobs.size(), c.threads, [&](std::size_t j) {
    const auto [seed, n] = jobs[j];
    std::vector<SweepRow>& rows = out[j];
    auto blank = [&](double dg, Paradigm p, int count) {
      SweepRow r;
      r.seed = seed;
      r.n_cavs = count;
      r.delta_g = dg;
      r.paradigm = p;
      return r;
    };
    SweepInstance inst;
    try {
      inst = make_instance(c, seed, n);
    } catch (const Error& e) {
      for (double dg : c.delta_g) {
        for (Paradigm p : c.paradigms) {
          rows.push_back(blank(dg, p, n));
          rows.back().error = e.what();
        }
      }
      return;
    }
    const BaselineConfig base = baseline_config_of(c, inst.link_seed);
    std::optional<ParadigmReport> vehicle, edge;
    std::string vehicle_error, edge_error;
    for (double dg : c.delta_g) {
      for (Paradigm p : c.paradigms) {
        SweepRow row = blank(dg, p, inst.n_cavs);
        try {
          if (p == Paradigm::kLgcp) {
            const LgcpResult res =
                lgcp_run(inst.scenario, inst.confidence,
                         lgcp_config_of(c, dg, inst.link_seed));
            row.report = res.report;
            row.n_groups = static_cast<int>(res.assignment.groups.size());
            row.dropped_members = static_cast<int>(res.dropped.size());
            if (c.detail) {
              row.detail = {{"assignment", assignment_to_json(res.assignment)},
                            {"schedule", schedule_to_json(res.schedule)}};
            }
          } else if (p == Paradigm::kVehicle) {
            if (!vehicle && vehicle_error.empty()) {
              try {
                vehicle = vehicle_based_run(inst.scenario, base);
              } catch (const Error& e) {
                vehicle_error = e.what();
              }
            }
            if (!vehicle) throw InvalidArgumentError(vehicle_error);
            row.report = vehicle;
          } else {
            if (!edge && edge_error.empty()) {
              try {
                edge = edge_assisted_run(inst.scenario, base);
              } catch (const Error& e) {
                edge_error = e.what();
              }
            }
            if (!edge) throw InvalidArgumentError(edge_error);
            row.report = edge;
          }
          row.error = CheckReport(*row.report, t_max_s);
        } catch (const Error& e) {
          row.report.reset();
          row.error = e.what();
        }
        rows.push_back(std::move(row));
      }
    }
  });

  SweepResult result;
  for (auto& rows : out) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::string s =
      "seed,n_cavs,delta_g,paradigm,volume_bits,latency_s,transmission_s,"
      "objective,"
      "global_confidence,feasible,t1,t2,t3,t4,t_delta,joint_latency,n_groups,"
      "dropped_members,undeliverable_links,error\n";
  for (const SweepRow& r : result.rows) {
    s += std::to_string(r.seed) + ',' + std::to_string(r.n_cavs) + ',' +
         format_double(r.delta_g) + ',' + std::string(paradigm_name(r.paradigm));
    if (r.report) {
      const ParadigmReport& p = *r.report;
      s += ',' + format_double(p.volume_bits) + ',' + format_double(p.latency_s) +
           ',' + format_double(p.transmission_s) + ',' + Opt(p.objective) + ',' + Opt(p.global_confidence) + ',' +
           (p.feasible ? "true" : "false");
      if (p.breakdown) {
        const LatencyBreakdown& b = *p.breakdown;
        for (double v : {b.t1, b.t2, b.t3, b.t4, b.t_delta, b.joint_latency}) {
          s += ',' + format_double(v);
        }
      } else {
        s += ",,,,,,";
      }
      s += ',' + std::to_string(r.n_groups) + ',' +
           std::to_string(r.dropped_members) + ',' +
           std::to_string(p.undeliverable_links);
    } else {
      s += ",,,,,,,,,,,,,,,";
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    s += ',' + err + '\n';
  }
  return s;
}

json sweep_to_json(const SweepResult& result) {
  json rows = json::array();
  for (const SweepRow& r : result.rows) {
    json j;
    if (r.report) {
      j = report_to_json(*r.report, r.delta_g);
    } else {
      j = {{"paradigm", paradigm_name(r.paradigm)},
           {"n_cavs", r.n_cavs},
           {"delta_g", r.delta_g}};
    }
    j["seed"] = r.seed;
    j["n_groups"] = r.n_groups;
    j["dropped_members"] = r.dropped_members;
    j["error"] = r.error.empty() ? json() : json(r.error);
    if (!r.detail.is_null()) j["detail"] = r.detail;
    rows.push_back(std::move(j));
  }
  return {{"rows", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// Oracle corpora

ConfidenceMap random_oracle_map(std::uint64_t seed, int max_cavs,
                                int max_areas) {
  Rng rng(seed);
  const int n_cavs = 1 + static_cast<int>(rng.below(max_cavs));
  const int n_areas = 1 + static_cast<int>(rng.below(max_areas));
  std::set<int> cells;
  while (static_cast<int>(cells.size()) < n_areas) {
    cells.insert(static_cast<int>(rng.below(392)));
  }
  std::vector<int> ids(n_cavs);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<double> values;
  for (int i = 0; i < n_areas * n_cavs; ++i) {
    const double u = rng.uniform();
    if (u < 0.15) {
      values.push_back(0.0);
    } else if (u < 0.40) {
      // Coarse values produce ties.
      values.push_back(static_cast<double>(1 + rng.below(19)) / 20.0);
    } else {
      values.push_back(rng.uniform());
    }
  }
  return ConfidenceMap({cells.begin(), cells.end()}, ids, std::move(values));
}

double random_delta_g(std::uint64_t seed) {
  Rng rng(seed);
  static constexpr double kGrid[] = {0.0, 0.05, 0.075, 0.1, 0.125, 0.25};
  const auto pick = rng.below(8);
  if (pick < 6) return kGrid[pick];
  return rng.uniform(0.0, 0.5);
}

ScheduleInstance random_schedule_instance(std::uint64_t seed, int max_packets,
                                          int max_subchannels) {
  Rng rng(seed);
  ScheduleInstance inst;
  inst.channel.n_subchannels = 1 + static_cast<int>(rng.below(max_subchannels));
  const int nodes = 2 + static_cast<int>(rng.below(5));
  for (int i = 0; i < nodes; ++i) {
    inst.positions[i] = {rng.uniform(0.0, 280.0), rng.uniform(0.0, 80.0)};
  }
  const int n = 1 + static_cast<int>(rng.below(max_packets));
  for (int i = 0; i < n; ++i) {
    const int src = static_cast<int>(rng.below(nodes));
    int dst = static_cast<int>(rng.below(nodes - 1));
    if (dst >= src) ++dst;
    inst.packets.push_back({src, dst, static_cast<int>(rng.below(4)),
                            std::nullopt, std::nullopt, 1.0});
  }
  return inst;
}

double replay_joint_latency(const Schedule& s, std::span<const AreaTask> tasks,
                            const ScheduleInputs& in) {
  int last_slot = -1;
  std::map<int, int> done;  // area -> exclusive end slot
  for (const Packet& p : s.packets) {
    last_slot = std::max(last_slot, *p.slot);
    done[p.area] = std::max(done[p.area], *p.slot + 1);
  }
  const double tx_end = (last_slot + 1) * in.tau_s;
  std::map<int, std::vector<std::pair<int, const AreaTask*>>> per_leader;
  for (const AreaTask& t : tasks) {
    per_leader[t.leader].push_back({done.count(t.area_id) ? done[t.area_id] : 0, &t});
  }
  double latest = tx_end;
  for (auto& [leader, list] : per_leader) {
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return std::make_pair(a.first, a.second->area_id) <
             std::make_pair(b.first, b.second->area_id);
    });
    double clock = 0.0;
    for (const auto& [slot, task] : list) {
      const double work = in.fusion.flops_full_fusion * task->group_size *
                          in.feature_bits / in.full_feature_bits /
                          in.compute_flops.at(leader);
      clock = std::max(clock, slot * in.tau_s) + work;
    }
    latest = std::max(latest, clock);
  }
  return latest;
}

// ---------------------------------------------------------------------------
// Verification

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return c.ok(); });
}

json VerifyReport::to_json() const {
  json props = json::array();
  for (const PropertyCheck& c : checks) {
    props.push_back({{"name", c.name},
                     {"passed", c.passed},
                     {"total", c.total},
                     {"ok", c.ok()},
                     {"failures", c.failures}});
  }
  json hist = json::object();
  for (const auto& [gap, count] : makespan_gap_histogram) {
    hist[std::to_string(gap)] = count;
  }
  return {{"properties", std::move(props)},
          {"makespan_gap_histogram", std::move(hist)},
          {"makespan_optimal", makespan_optimal},
          {"makespan_instances", makespan_instances},
          {"leader_gap",
           {{"mean_ratio", leader_gap_mean},
            {"max_ratio", leader_gap_max},
            {"over_2x", leader_over_2x},
            {"instances", leader_instances}}},
          {"ok", ok()}};
}

VerifyReport run_verify(const ExperimentConfig& c) {
  std::vector<std::string> guard;
  if (c.verify_max_cavs > kOracleMaxCavs) {
    guard.push_back("verify.max_cavs=" + std::to_string(c.verify_max_cavs));
  }
  if (c.verify_max_areas > kOracleMaxAreas) {
    guard.push_back("verify.max_areas=" + std::to_string(c.verify_max_areas));
  }
  if (c.verify_max_packets > kOracleMaxPackets) {
    guard.push_back("verify.max_packets=" + std::to_string(c.verify_max_packets));
  }
  if (c.verify_max_subchannels > kOracleMaxSubchannels) {
    guard.push_back("verify.max_subchannels=" +
                    std::to_string(c.verify_max_subchannels));
  }
  if (!guard.empty()) {
    std::string msg = "oracle guard exceeded:";
    for (const auto& g : guard) msg += " " + g;
    throw RefusalError(msg);
  }
  if (c.verify_max_cavs < 1 || c.verify_max_areas < 1 ||
      c.verify_max_packets < 1 || c.verify_max_subchannels < 1) {
    throw ValidationError("verify sizes must be >= 1");
  }
  if (c.seeds.empty()) throw ValidationError("seeds list is empty");
  const std::uint64_t base = c.seeds.front();
  const int n = c.verify_instances;
  const double bits = default_feature_bits(
      RoiGrid::Build(c.grid.width_m, c.grid.height_m, c.grid.cell_w,
                     c.grid.cell_h),
      c.full_feature_bits);

  VerifyReport report;
  PropertyCheck members{"group-members-equal-oracle", 0, 0, {}};
  PropertyCheck loads{"load-identity", 0, 0, {}};
  PropertyCheck leader{"oracle-max-load-not-above-greedy", 0, 0, {}};
  double gap_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t s = derive_seed({base, kTagGroups, static_cast<std::uint64_t>(i)});
    const ConfidenceMap map =
        random_oracle_map(s, c.verify_max_cavs, c.verify_max_areas);
    const double dg = random_delta_g(mix64(s));
    const Assignment greedy = select_groups(map, dg, bits);
    const Assignment oracle = brute_force_groups(map, dg, bits, map.n_cavs());
    bool same = greedy.groups.size() == oracle.groups.size();
    for (const auto& [area, g] : greedy.groups) {
      auto it = oracle.groups.find(area);
      same = same && it != oracle.groups.end() && it->second.members == g.members;
    }
    const std::string tag = "instance " + std::to_string(i);
    Record(members, same, tag);
    bool identity = true;
    try {
      validate_assignment(greedy, map, bits);
    } catch (const ValidationError&) {
      identity = false;
    }
    Record(loads, identity, tag);
    const double g_max = greedy.max_load();
    const double o_max = oracle.max_load();
    Record(leader, o_max <= g_max, tag);
    if (o_max > 0.0) {
      const double ratio = g_max / o_max;
      gap_sum += ratio;
      report.leader_gap_max = std::max(report.leader_gap_max, ratio);
      if (ratio > 2.0) ++report.leader_over_2x;
      ++report.leader_instances;
    }
  }
  report.leader_gap_mean =
      report.leader_instances ? gap_sum / report.leader_instances : 0.0;

  PropertyCheck dominance{"priority-makespan-not-below-oracle", 0, 0, {}};
  PropertyCheck conflict_free{"conflict-free-replay", 0, 0, {}};
  PropertyCheck complete{"every-packet-placed-once", 0, 0, {}};
  PropertyCheck bounds{"makespan-bounds", 0, 0, {}};
  for (int i = 0; i < n; ++i) {
    const std::uint64_t s = derive_seed({base, kTagSched, static_cast<std::uint64_t>(i)});
    const ScheduleInstance inst = random_schedule_instance(
        s, c.verify_max_packets, c.verify_max_subchannels);
    ScheduleInputs in;
    in.channel = inst.channel;
    in.positions = inst.positions;
    in.tau_s = 1.0;
    in.feature_bits = 1.0;
    in.check_links = false;
    const Schedule sched = schedule(inst.packets, {}, in);
    const int best = brute_force_schedule(inst.packets, inst.channel, inst.positions);
    const std::string tag = "instance " + std::to_string(i);
    Record(dominance, sched.makespan_slots >= best, tag);
    ++report.makespan_gap_histogram[sched.makespan_slots - best];
    ++report.makespan_instances;
    if (sched.makespan_slots == best) ++report.makespan_optimal;
    const auto violation =
        find_schedule_violation(sched, inst.channel, inst.positions);
    Record(conflict_free, !violation, tag + (violation ? ": " + *violation : ""));
    Record(complete, CompletenessIssue(inst.packets, sched).empty(), tag);
    const std::string b =
        BoundsIssue(inst.packets.size(), inst.channel.n_subchannels, sched);
    Record(bounds, b.empty(), tag + ": " + b);
  }

  // Full-size pipelines: generated scenarios of varying density.
  PropertyCheck fusion{"fusion-accounting-replay", 0, 0, {}};
  for (int i = 0; i < n; ++i) {
    const std::uint64_t s = derive_seed({base, kTagFull, static_cast<std::uint64_t>(i)});
    Rng rng(s);
    const int n_cavs = 2 + static_cast<int>(rng.below(29));
    const int n_bg = static_cast<int>(rng.below(31));
    const Scenario scenario = generate_scenario(s, n_cavs, n_bg, c.grid, c.generator);
    const ConfidenceMap map = synthetic_confidence(scenario, c.confidence, s);
    static constexpr double kSweep[] = {0.05, 0.075, 0.1, 0.125};
    LgcpConfig cfg = lgcp_config_of(c, kSweep[rng.below(4)], mix64(s));
    const LgcpPlan plan = plan_lgcp(scenario, map, cfg);
    const std::string tag = "scenario " + std::to_string(i);
    for (int variant = 0; variant < 2; ++variant) {
      const Schedule sched =
          variant == 0 ? schedule(plan.packets, plan.tasks, plan.inputs)
                       : schedule_random(plan.packets, plan.tasks, plan.inputs, s);
      const auto violation =
          find_schedule_violation(sched, plan.inputs.channel, plan.inputs.positions);
      Record(conflict_free, !violation, tag + (violation ? ": " + *violation : ""));
      Record(complete, CompletenessIssue(plan.packets, sched).empty(), tag);
      const std::string b = BoundsIssue(plan.packets.size(),
                                        plan.inputs.channel.n_subchannels, sched);
      Record(bounds, b.empty(), tag + ": " + b);
      const double replay = replay_joint_latency(sched, plan.tasks, plan.inputs);
      Record(fusion, std::abs(replay - sched.joint_latency_s) <= 1e-12, tag);
    }
  }
  report.checks = {members,       loads,    leader, dominance,
                   conflict_free, complete, bounds, fusion};
  return report;
}

// ---------------------------------------------------------------------------
// Scheduler comparison

json CompareReport::to_json() const {
  json per_seed = json::array();
  for (const CompareRow& r : rows) {
    per_seed.push_back({{"seed", r.seed},
                        {"packets", r.packets},
                        {"priority_joint_s", r.priority_joint_s},
                        {"random_joint_s", r.random_joint_s},
                        {"priority_total_s", r.priority_total_s},
                        {"random_total_s", r.random_total_s}});
  }
  return {{"priority_median_s", priority_median_s},
          {"random_median_s", random_median_s},
          {"priority_mean_s", priority_mean_s},
          {"random_mean_s", random_mean_s},
          {"median_reduction", median_reduction},
          {"rows", std::move(per_seed)}};
}

CompareReport run_compare_sched(const ExperimentConfig& c) {
  validate_config(c);
  if (c.seeds.size() < 30) {
    throw ValidationError("compare-sched needs at least 30 seeds, got " +
                          std::to_string(c.seeds.size()));
  }
  CompareReport report;
  report.rows.resize(c.seeds.size());
  RunParallel(c.seeds.size(), c.threads, [&](std::size_t i) {
    const std::uint64_t seed = c.seeds[i];
    const Scenario scenario = generate_scenario(
        seed, c.compare_n_cavs, c.compare_n_background, c.grid, c.generator);
    const ConfidenceMap map = synthetic_confidence(
        scenario, c.confidence, derive_seed({seed, kTagCompare}));
    const LgcpConfig cfg = lgcp_config_of(c, c.delta_g.front(),
                                          derive_seed({seed, kTagLink}));
    const LgcpPlan plan = plan_lgcp(scenario, map, cfg);
    const Schedule prio = schedule(plan.packets, plan.tasks, plan.inputs);
    const Schedule rnd = schedule_random(plan.packets, plan.tasks, plan.inputs,
                                         derive_seed({seed, kTagCompare, 1}));
    const double t_delta =
        latency_breakdown(c.messages, c.compare_n_cavs, c.channel, 0.0).t_delta;
    CompareRow& row = report.rows[i];
    row.seed = seed;
    row.packets = static_cast<int>(plan.packets.size());
    row.priority_joint_s = prio.joint_latency_s;
    row.random_joint_s = rnd.joint_latency_s;
    row.priority_total_s = t_delta + prio.joint_latency_s;
    row.random_total_s = t_delta + rnd.joint_latency_s;
  });
  std::vector<double> p, r;
  for (const CompareRow& row : report.rows) {
    p.push_back(row.priority_joint_s);
    r.push_back(row.random_joint_s);
  }
  report.priority_median_s = median(p);
  report.random_median_s = median(r);
  report.priority_mean_s = std::accumulate(p.begin(), p.end(), 0.0) / p.size();
  report.random_mean_s = std::accumulate(r.begin(), r.end(), 0.0) / r.size();
  report.median_reduction =
      report.random_median_s > 0.0
          ? (report.random_median_s - report.priority_median_s) /
                report.random_median_s
          : 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_generate(const ExperimentConfig& c,
                 std::vector<std::filesystem::path>* written) {
  validate_config(c);
  const std::filesystem::path dir = c.out;
  for (std::uint64_t seed : c.seeds) {
    for (int n : c.n_cavs) {
      const Scenario s =
          generate_scenario(seed, n, c.n_background, c.grid, c.generator);
      const auto path = dir / ("scenario_s" + std::to_string(seed) + "_n" +
                               std::to_string(n) + ".json");
      save_scenario(s, path);
      if (written) written->push_back(path);
    }
  }
  return 0;
}

int cmd_run(const ExperimentConfig& c) {
  const SweepResult result = run_sweep(c);
  if (c.format == "json") {
    write_text_file(c.out, sweep_to_json(result).dump(2) + "\n");
  } else {
    write_text_file(c.out, sweep_to_csv(result));
  }
  return result.failures() > 0 ? 2 : 0;
}

int cmd_verify(const ExperimentConfig& c) {
  const VerifyReport report = run_verify(c);
  write_text_file(c.out, report.to_json().dump(2) + "\n");
  return report.ok() ? 0 : 2;
}

int cmd_compare_sched(const ExperimentConfig& c) {
  const CompareReport report = run_compare_sched(c);
  write_text_file(c.out, report.to_json().dump(2) + "\n");
  return 0;
}

}  // namespace lgcp
