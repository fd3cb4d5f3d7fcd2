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

#ifndef LGCP_SCHEDULER_H_
#define LGCP_SCHEDULER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lgcp/assignment.h"
#include "lgcp/radio.h"

namespace lgcp {

// An area feature travelling from a group member to its leader. Subchannel
// and slot are set together by the scheduler.
struct Packet {
  int src = 0;
  int dst = 0;
  int area = 0;
  std::optional<int> subchannel;
  std::optional<int> slot;
  double size_bits = 0.0;

  bool placed() const { return subchannel.has_value() && slot.has_value(); }
  friend bool operator==(const Packet&, const Packet&) = default;
};

// Fusion work owed by `leader` once every packet of `area_id` has arrived.
struct AreaTask {
  int area_id = 0;
  int leader = 0;
  int group_size = 1;
};

// Cost of fusing one collaborator's full feature.
struct FusionCostModel {
  double flops_full_fusion = 1400e6;
};

// Named presets: "cobevt" (2228 MFLOPs), "where2comm" (1400 MFLOPs) and
// "coalign" (2684 MFLOPs). Returns nullopt for unknown names.
std::optional<FusionCostModel> fusion_preset(std::string_view name);

// kStatic ranks packets once from the full packet set; kDynamic re-ranks the
// unplaced packets at the start of every slot.
enum class PriorityMode { kStatic, kDynamic };

struct ScheduleInputs {
  ChannelParams channel;
  std::map<int, Point2> positions;
  std::map<int, double> compute_flops;
  FusionCostModel fusion;
  double tau_s = 0.0;
  double feature_bits = 0.0;       // size of one packet
  double full_feature_bits = 2.16e6;
  std::uint64_t link_seed = 0;     // shadowing seed for the feasibility gate
  bool check_links = true;
  PriorityMode priority_mode = PriorityMode::kStatic;
};

struct Schedule {
  double tau_s = 0.0;
  std::vector<Packet> packets;          // in placement order
  std::map<int, int> area_complete_slot;  // exclusive end slot, 0 if no packets
  std::map<int, double> area_fusion_end_s;
  std::map<int, double> per_cav_fusion_remaining;  // at the last transmission
  int makespan_slots = 0;
  double joint_latency_s = 0.0;
};

// One packet per non-leader member of every group, addressed to the leader.
std::vector<Packet> build_packets(const Assignment& assignment,
                                  double feature_bits);
std::vector<AreaTask> fusion_tasks(const Assignment& assignment);

// Sender load plus receiver load, both counted in packets.
inline int priority(int sender_load, int receiver_load) {
  return sender_load + receiver_load;
}

// Packet indices by descending priority, ties by ascending (area, src, dst).
std::vector<std::size_t> priority_order(std::span<const Packet> packets);

// Seconds `leader` needs to fuse one area of `group_size` features.
double area_fusion_time(const ScheduleInputs& in, int leader, int group_size);

// Slot-by-slot allocation in priority order, with leaders fusing completed
// areas (FIFO by completion) while later packets are still in flight.
// Throws SchedulingError when a packet's link fails the rate gate and
// InvalidArgumentError on inconsistent inputs.
Schedule schedule(std::span<const Packet> packets,
                  std::span<const AreaTask> tasks, const ScheduleInputs& in);

// Same slot loop with a seeded uniform shuffle instead of priorities.
Schedule schedule_random(std::span<const Packet> packets,
                         std::span<const AreaTask> tasks,
                         const ScheduleInputs& in, std::uint64_t seed);

// Transmission-only minimum makespan by exhaustive search.
// Throws RefusalError above 8 packets or 3 subchannels.
int brute_force_schedule(std::span<const Packet> packets,
                         const ChannelParams& channel,
                         const std::map<int, Point2>& positions);

inline constexpr int kOracleMaxPackets = 8;
inline constexpr int kOracleMaxSubchannels = 3;

// Re-checks a finished schedule against the interference predicate and the
// per-slot subchannel budget; returns a description of the first violation.
std::optional<std::string> find_schedule_violation(
    const Schedule& schedule, const ChannelParams& channel,
    const std::map<int, Point2>& positions);

nlohmann::json schedule_to_json(const Schedule& schedule);

}  // namespace lgcp

#endif  // LGCP_SCHEDULER_H_
