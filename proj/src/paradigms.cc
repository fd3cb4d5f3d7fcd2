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

#include "lgcp/paradigms.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lgcp/error.h"
#include "lgcp/io.h"

namespace lgcp {
namespace {

std::map<int, Point2> Positions(const Scenario& s) {
  std::map<int, Point2> out;
  for (const CavState& c : s.cavs) out[c.id] = c.position;
  return out;
}

std::map<int, double> Compute(const Scenario& s) {
  std::map<int, double> out;
  for (const CavState& c : s.cavs) out[c.id] = c.compute_flops;
  return out;
}

int Waves(int n, int z) { return (n + z - 1) / z; }

}  // namespace

std::string_view paradigm_name(Paradigm p) {
  switch (p) {
    case Paradigm::kLgcp:
      return "lgcp";
    case Paradigm::kVehicle:
      return "vehicle";
    case Paradigm::kEdge:
      return "edge";
  }
  return "unknown";
}

std::optional<Paradigm> parse_paradigm(std::string_view name) {
  if (name == "lgcp") return Paradigm::kLgcp;
  if (name == "vehicle") return Paradigm::kVehicle;
  if (name == "edge") return Paradigm::kEdge;
  return std::nullopt;
}

double default_feature_bits(const RoiGrid& grid, double full_feature_bits) {
  return full_feature_bits * (grid.cell_w() * grid.cell_h()) /
         (grid.width_m() * grid.height_m());
}

double slot_duration(const LgcpConfig& config, double feature_bits) {
  if (config.slot_policy == SlotPolicy::kFixed) return config.fixed_slot_s;
  return feature_bits / config.channel.fixed_rate_bps();
}

LatencyBreakdown latency_breakdown(const ControlMessageSizes& m, int n_cavs,
                                   const ChannelParams& channel,
                                   double joint_latency_s) {
  const double r = channel.fixed_rate_bps();
  const int waves = Waves(n_cavs, channel.n_subchannels);
  LatencyBreakdown b;
  b.t1 = m.d_init / r + waves * m.d_info / r;
  b.t2 = m.d_ts / r;
  b.t3 = joint_latency_s + m.d_rep / r;
  b.t4 = m.d_g / r;
  b.t_delta = (m.d_init + waves * m.d_info + m.d_ts + m.d_rep + m.d_g) / r;
  b.joint_latency = joint_latency_s;
  b.total = b.t_delta + joint_latency_s;
  return b;
}

double objective(double global_confidence, double t_delta,
                 double joint_latency) {
  const double latency = t_delta + joint_latency;
  if (!(latency > 0.0)) {
    throw InvalidArgumentError("objective needs a positive latency");
  }
  return global_confidence / latency;
}

LgcpPlan plan_lgcp(const Scenario& scenario, const ConfidenceMap& confidence,
                   const LgcpConfig& config) {
  validate_channel(config.channel);
  LgcpPlan plan;
  const double bits = config.feature_bits.value_or(
      default_feature_bits(scenario.grid, config.full_feature_bits));
  const double tau = slot_duration(config, bits);
  const double airtime = bits / config.channel.fixed_rate_bps();
  if (std::abs(airtime - config.fixed_slot_s) > 1e-12) {
    plan.notes.push_back("packet airtime " + format_double(airtime * 1e3) +
                         " ms differs from the fixed slot " +
                         format_double(config.fixed_slot_s * 1e3) +
                         " ms; using " + format_double(tau * 1e3) + " ms");
  }

  plan.assignment = select_groups(confidence, config.delta_g, bits);

  // Drop members that cannot reach their leader at the gated rate.
  const std::map<int, Point2> positions = Positions(scenario);
  for (auto& [area, g] : plan.assignment.groups) {
    std::vector<int> kept;
    for (int m : g.members) {
      if (m != g.leader) {
        const LinkState link =
            link_state(config.channel, m, positions.at(m), g.leader,
                       positions.at(g.leader), config.link_seed);
        if (!link.feasible) {
          plan.dropped.push_back({area, m, g.leader});
          plan.notes.push_back("dropped CAV " + std::to_string(m) +
                               " from area " + std::to_string(area) +
                               ": link to leader " + std::to_string(g.leader) +
                               " below gate");
          continue;
        }
      }
      kept.push_back(m);
    }
    g.members = std::move(kept);
  }
  plan.assignment.loads =
      compute_loads(plan.assignment.groups, confidence.cav_ids(), bits);

  ScheduleInputs& in = plan.inputs;
  in.channel = config.channel;
  in.positions = positions;
  in.compute_flops = Compute(scenario);
  in.fusion = config.fusion;
  in.tau_s = tau;
  in.feature_bits = bits;
  in.full_feature_bits = config.full_feature_bits;
  in.link_seed = config.link_seed;
  in.priority_mode = config.priority_mode;
  plan.packets = build_packets(plan.assignment, bits);
  plan.tasks = fusion_tasks(plan.assignment);
  return plan;
}

LgcpResult lgcp_run(const Scenario& scenario, const ConfidenceMap& confidence,
                    const LgcpConfig& config) {
  LgcpPlan plan = plan_lgcp(scenario, confidence, config);
  LgcpResult out;
  out.feature_bits = plan.inputs.feature_bits;
  out.assignment = std::move(plan.assignment);
  out.dropped = std::move(plan.dropped);
  out.schedule = schedule(plan.packets, plan.tasks, plan.inputs);

  ParadigmReport& report = out.report;
  report.paradigm = Paradigm::kLgcp;
  report.n_cavs = static_cast<int>(scenario.cavs.size());
  report.notes = std::move(plan.notes);
  out.breakdown = latency_breakdown(config.messages, report.n_cavs,
                                    config.channel,
                                    out.schedule.joint_latency_s);
  const double conf = global_confidence(confidence, out.assignment);
  report.global_confidence = conf;
  report.objective =
      objective(conf, out.breakdown.t_delta, out.breakdown.joint_latency);
  report.latency_s = out.breakdown.total;
  report.transmission_s = out.schedule.makespan_slots * out.schedule.tau_s;
  report.breakdown = out.breakdown;
  report.feasible = out.breakdown.total <= config.t_max_s;

  const ControlMessageSizes& m = config.messages;
  double volume = m.d_init + report.n_cavs * m.d_info + m.d_ts + m.d_g;
  for (const auto& [area, g] : out.assignment.groups) {
    volume += (g.size() - 1) * out.feature_bits + m.d_rep;
  }
  report.volume_bits = volume;
  return out;
}

ParadigmReport vehicle_based_run(const Scenario& scenario,
                                 const BaselineConfig& config) {
  const int n = static_cast<int>(scenario.cavs.size());
  if (n < 1) throw InvalidArgumentError("vehicle-based run needs >= 1 CAV");
  validate_channel(config.channel);
  ParadigmReport r;
  r.paradigm = Paradigm::kVehicle;
  r.n_cavs = n;
  const double tau = config.full_feature_bits / config.channel.fixed_rate_bps();
  const std::map<int, Point2> positions = Positions(scenario);
  const std::map<int, double> compute = Compute(scenario);

  std::map<int, int> received;
  double tx_time = 0.0;
  if (config.vehicle_mode == VehicleMode::kBroadcast) {
    // Every CAV is a receiver of every broadcast, so half duplex
    // serialises them.
    r.volume_bits = n * config.full_feature_bits;
    tx_time = n * tau;
    for (const CavState& c : scenario.cavs) received[c.id] = n - 1;
  } else {
    r.volume_bits = static_cast<double>(n) * (n - 1) * config.full_feature_bits;
    std::vector<Packet> packets;
    for (const CavState& s : scenario.cavs) {
      for (const CavState& d : scenario.cavs) {
        if (s.id == d.id) continue;
        const LinkState link = link_state(config.channel, s.id, s.position,
                                          d.id, d.position, config.link_seed);
        if (!link.feasible) {
          ++r.undeliverable_links;
          continue;
        }
        packets.push_back({s.id, d.id, s.id, std::nullopt, std::nullopt,
                           config.full_feature_bits});
        ++received[d.id];
      }
    }
    ScheduleInputs in;
    in.channel = config.channel;
    in.positions = positions;
    in.compute_flops = compute;
    in.fusion = config.fusion;
    in.tau_s = tau;
    in.feature_bits = config.full_feature_bits;
    in.full_feature_bits = config.full_feature_bits;
    in.check_links = false;
    const Schedule sched = schedule(packets, {}, in);
    tx_time = sched.makespan_slots * tau;
    if (r.undeliverable_links > 0) {
      r.notes.push_back(std::to_string(r.undeliverable_links) +
                        " CAV pairs below the rate gate");
    }
  }
  double slowest = 0.0;
  for (const auto& [id, count] : received) {
    slowest = std::max(
        slowest, count * config.fusion.flops_full_fusion / compute.at(id));
  }
  r.transmission_s = tx_time;
  r.latency_s = tx_time + slowest;
  r.feasible = r.latency_s <= config.t_max_s;
  return r;
}

ParadigmReport edge_assisted_run(const Scenario& scenario,
                                 const BaselineConfig& config) {
  const int n = static_cast<int>(scenario.cavs.size());
  if (n < 1) throw InvalidArgumentError("edge-assisted run needs >= 1 CAV");
  validate_channel(config.channel);
  if (!(config.edge_compute_flops > 0.0)) {
    throw InvalidArgumentError("edge compute must be positive");
  }
  ParadigmReport r;
  r.paradigm = Paradigm::kEdge;
  r.n_cavs = n;
  r.volume_bits = n * config.full_feature_bits;
  const double rate = config.channel.fixed_rate_bps();
  const double uplink =
      Waves(n, config.channel.n_subchannels) * config.full_feature_bits / rate;
  const double fusion =
      n * config.fusion.flops_full_fusion / config.edge_compute_flops;
  const double downlink = config.messages.d_g / rate;
  r.transmission_s = uplink;
  r.latency_s = uplink + fusion + downlink;
  r.feasible = r.latency_s <= config.t_max_s;
  return r;
}

nlohmann::json breakdown_to_json(const LatencyBreakdown& b) {
  return {{"t1", b.t1},           {"t2", b.t2},
          {"t3", b.t3},           {"t4", b.t4},
          {"t_delta", b.t_delta}, {"joint_latency", b.joint_latency},
          {"total", b.total}};
}

nlohmann::json report_to_json(const ParadigmReport& r, double delta_g) {
  nlohmann::json j = {{"paradigm", paradigm_name(r.paradigm)},
                      {"n_cavs", r.n_cavs},
                      {"delta_g", delta_g},
                      {"volume_bits", r.volume_bits},
                      {"latency_s", r.latency_s},
                      {"transmission_s", r.transmission_s},
                      {"feasible", r.feasible},
                      {"undeliverable_links", r.undeliverable_links}};
  j["objective"] = r.objective ? nlohmann::json(*r.objective) : nlohmann::json();
  j["global_confidence"] = r.global_confidence
                               ? nlohmann::json(*r.global_confidence)
                               : nlohmann::json();
  j["breakdown"] =
      r.breakdown ? breakdown_to_json(*r.breakdown) : nlohmann::json();
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

}  // namespace lgcp
