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

#ifndef LGCP_PARADIGMS_H_
#define LGCP_PARADIGMS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lgcp/assignment.h"
#include "lgcp/confidence.h"
#include "lgcp/radio.h"
#include "lgcp/scenario.h"
#include "lgcp/scheduler.h"

namespace lgcp {

// Control message lengths in bits.
struct ControlMessageSizes {
  double d_init = 1600.0;   // initiation broadcast
  double d_info = 1600.0;   // per-CAV status report
  double d_ts = 8000.0;     // task assignment broadcast
  double d_rep = 160000.0;  // per-group result upload
  double d_g = 160000.0;    // global view broadcast
};

struct LatencyBreakdown {
  double t1 = 0.0;  // initiation + status reports
  double t2 = 0.0;  // task assignment
  double t3 = 0.0;  // data sharing, fusion and result upload
  double t4 = 0.0;  // global view broadcast
  double t_delta = 0.0;
  double joint_latency = 0.0;
  double total = 0.0;

  double stage_sum() const { return t1 + t2 + t3 + t4; }
};

enum class Paradigm { kLgcp, kVehicle, kEdge };
std::string_view paradigm_name(Paradigm p);
std::optional<Paradigm> parse_paradigm(std::string_view name);

struct ParadigmReport {
  Paradigm paradigm = Paradigm::kLgcp;
  int n_cavs = 0;
  double volume_bits = 0.0;
  double latency_s = 0.0;
  double transmission_s = 0.0;  // feature airtime, excluding fusion
  std::optional<double> objective;          // LGCP only
  std::optional<double> global_confidence;  // LGCP only
  bool feasible = false;                    // latency within the deadline
  std::optional<LatencyBreakdown> breakdown;
  int undeliverable_links = 0;
  std::vector<std::string> notes;
};

// How the slot duration is chosen: one packet's airtime, or a fixed value.
enum class SlotPolicy { kPacketDuration, kFixed };

struct LgcpConfig {
  double delta_g = 0.075;
  std::optional<double> feature_bits;  // default: RoI-proportional slice
  double full_feature_bits = 2.16e6;
  ChannelParams channel;
  FusionCostModel fusion;
  ControlMessageSizes messages;
  double t_max_s = 0.100;
  SlotPolicy slot_policy = SlotPolicy::kPacketDuration;
  double fixed_slot_s = 0.25e-3;
  PriorityMode priority_mode = PriorityMode::kStatic;
  std::uint64_t link_seed = 0;
};

// Vehicle-based exchange either unicasts every feature to every other CAV or
// broadcasts it once.
enum class VehicleMode { kUnicast, kBroadcast };

struct BaselineConfig {
  double full_feature_bits = 2.16e6;
  ChannelParams channel;
  FusionCostModel fusion;
  ControlMessageSizes messages;
  double t_max_s = 0.100;
  double edge_compute_flops = 2e12;
  VehicleMode vehicle_mode = VehicleMode::kUnicast;
  std::uint64_t link_seed = 0;
};

struct DroppedMember {
  int area_id = 0;
  int cav_id = 0;
  int leader = 0;
};

struct LgcpResult {
  ParadigmReport report;
  Assignment assignment;
  Schedule schedule;
  LatencyBreakdown breakdown;
  std::vector<DroppedMember> dropped;
  double feature_bits = 0.0;
};

// Full feature size scaled by the share of the RoI one nominal cell covers.
double default_feature_bits(const RoiGrid& grid, double full_feature_bits);

double slot_duration(const LgcpConfig& config, double feature_bits);

// Stage latencies around a joint transmit-and-fuse latency.
LatencyBreakdown latency_breakdown(const ControlMessageSizes& messages,
                                   int n_cavs, const ChannelParams& channel,
                                   double joint_latency_s);

// Mean confidence per second of end-to-end latency. Throws
// InvalidArgumentError when the latency is not positive.
double objective(double global_confidence, double t_delta,
                 double joint_latency);

// Assignment and scheduler inputs for one LGCP cycle, after members whose
// link to their leader fails the rate gate have been dropped.
struct LgcpPlan {
  Assignment assignment;
  std::vector<DroppedMember> dropped;
  std::vector<Packet> packets;
  std::vector<AreaTask> tasks;
  ScheduleInputs inputs;
  std::vector<std::string> notes;
};

LgcpPlan plan_lgcp(const Scenario& scenario, const ConfidenceMap& confidence,
                   const LgcpConfig& config);

// Group selection, link fallback, scheduling and latency accounting.
// Members whose link to their leader fails the rate gate are dropped from
// the group (recorded in `dropped` and the report notes).
LgcpResult lgcp_run(const Scenario& scenario, const ConfidenceMap& confidence,
                    const LgcpConfig& config);

// Every CAV sends its full feature to every other CAV; completion waits for
// the slowest CAV's fusion. Throws InvalidArgumentError below two CAVs.
ParadigmReport vehicle_based_run(const Scenario& scenario,
                                 const BaselineConfig& config);

// Every CAV uploads its full feature to an edge server that fuses centrally
// and broadcasts the result.
ParadigmReport edge_assisted_run(const Scenario& scenario,
                                 const BaselineConfig& config);

nlohmann::json breakdown_to_json(const LatencyBreakdown& b);
nlohmann::json report_to_json(const ParadigmReport& r, double delta_g);

}  // namespace lgcp

#endif  // LGCP_PARADIGMS_H_
