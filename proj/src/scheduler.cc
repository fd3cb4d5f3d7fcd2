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

#include "lgcp/scheduler.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "lgcp/error.h"
#include "lgcp/io.h"
#include "lgcp/rng.h"

namespace lgcp {
namespace {

const Point2& PositionOf(const std::map<int, Point2>& positions, int id) {
  auto it = positions.find(id);
  if (it == positions.end()) {
    throw InvalidArgumentError("no position for node " + std::to_string(id));
  }
  return it->second;
}

Transmission ToTransmission(const Packet& p, int subchannel,
                            const std::map<int, Point2>& positions) {
  return {p.src, p.dst, PositionOf(positions, p.src),
          PositionOf(positions, p.dst), subchannel};
}

// Ranking over the packets selected by `alive`.
std::vector<std::size_t> RankByLoad(std::span<const Packet> packets,
                                    const std::vector<bool>& alive) {
  std::map<int, int> sent, received;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    if (!alive[i]) continue;
    ++sent[packets[i].src];
    ++received[packets[i].dst];
    idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const Packet& pa = packets[a];
    const Packet& pb = packets[b];
    const int wa = priority(sent[pa.src], received[pa.dst]);
    const int wb = priority(sent[pb.src], received[pb.dst]);
    if (wa != wb) return wa > wb;
    return std::tie(pa.area, pa.src, pa.dst) < std::tie(pb.area, pb.src, pb.dst);
  });
  return idx;
}

void CheckInputs(std::span<const Packet> packets,
                 std::span<const AreaTask> tasks, const ScheduleInputs& in) {
  validate_channel(in.channel);
  if (!(in.tau_s > 0.0)) throw InvalidArgumentError("slot duration must be > 0");
  if (!(in.full_feature_bits > 0.0)) {
    throw InvalidArgumentError("full feature size must be > 0");
  }
  std::map<int, int> leader_of;
  for (const AreaTask& t : tasks) {
    if (t.group_size < 1) throw InvalidArgumentError("empty area task");
    if (!leader_of.emplace(t.area_id, t.leader).second) {
      throw InvalidArgumentError("duplicate task for area " +
                                 std::to_string(t.area_id));
    }
  }
  for (const Packet& p : packets) {
    if (p.src == p.dst) {
      throw InvalidArgumentError("packet with src == dst (" +
                                 std::to_string(p.src) + ")");
    }
    auto it = leader_of.find(p.area);
    if (!tasks.empty() && (it == leader_of.end() || it->second != p.dst)) {
      throw InvalidArgumentError("packet for area " + std::to_string(p.area) +
                                 " is not addressed to its leader");
    }
    if (in.check_links) {
      const LinkState link =
          link_state(in.channel, p.src, PositionOf(in.positions, p.src), p.dst,
                     PositionOf(in.positions, p.dst), in.link_seed);
      if (!link.feasible) {
        throw SchedulingError(
            "link " + std::to_string(p.src) + "->" + std::to_string(p.dst) +
            " is below the rate gate (" +
            format_double(link.achievable_bps / 1e6) + " Mbps)");
      }
    }
  }
}

// Slot loop shared by the priority and random schedulers. `order` ranks
// packet indices; it is recomputed per slot when `rerank` is set.
Schedule RunSlots(std::span<const Packet> packets,
                  std::span<const AreaTask> tasks, const ScheduleInputs& in,
                  std::vector<std::size_t> order, bool rerank) {
  const int z_count = in.channel.n_subchannels;
  Schedule out;
  out.tau_s = in.tau_s;
  std::vector<bool> pending(packets.size(), true);
  std::map<int, int> remaining_per_area;
  for (const Packet& p : packets) ++remaining_per_area[p.area];
  for (const AreaTask& t : tasks) out.area_complete_slot[t.area_id] = 0;

  std::size_t left = packets.size();
  int slot = 0;
  while (left > 0) {
    if (rerank && slot > 0) order = RankByLoad(packets, pending);
    std::vector<Transmission> placed;
    for (int z = 0; z < z_count; ++z) {
      for (std::size_t i : order) {
        if (!pending[i]) continue;
        const Transmission tx = ToTransmission(packets[i], z, in.positions);
        if (conflicts(tx, placed, in.channel.interference_radius_m)) continue;
        Packet p = packets[i];
        p.subchannel = z;
        p.slot = slot;
        out.packets.push_back(p);
        placed.push_back(tx);
        pending[i] = false;
        --left;
        if (--remaining_per_area[p.area] == 0) {
          out.area_complete_slot[p.area] = slot + 1;
        }
        break;
      }
    }
    ++slot;
  }
  out.makespan_slots = slot;

  // Fusion: each leader works through its areas in completion order.
  const double tx_end = out.makespan_slots * in.tau_s;
  std::vector<AreaTask> queue(tasks.begin(), tasks.end());
  std::stable_sort(queue.begin(), queue.end(),
                   [&](const AreaTask& a, const AreaTask& b) {
                     const int ca = out.area_complete_slot[a.area_id];
                     const int cb = out.area_complete_slot[b.area_id];
                     if (ca != cb) return ca < cb;
                     return a.area_id < b.area_id;
                   });
  std::map<int, double> busy_until;
  double latest = tx_end;
  for (const AreaTask& t : queue) {
    const double ready = out.area_complete_slot[t.area_id] * in.tau_s;
    const double start = std::max(ready, busy_until[t.leader]);
    const double end = start + area_fusion_time(in, t.leader, t.group_size);
    busy_until[t.leader] = end;
    out.area_fusion_end_s[t.area_id] = end;
    latest = std::max(latest, end);
  }
  for (const auto& [cav, end] : busy_until) {
    out.per_cav_fusion_remaining[cav] = std::max(0.0, end - tx_end);
  }
  out.joint_latency_s = latest;
  return out;
}

bool SlotAccepts(const std::vector<Transmission>& slot, const Transmission& t,
                 double radius) {
  return !conflicts(t, slot, radius);
}

bool Place(std::size_t i, int slots, std::vector<std::vector<Transmission>>& grid,
           const std::vector<Packet>& packets, const ChannelParams& ch,
           const std::map<int, Point2>& positions) {
  if (i == packets.size()) return true;
  int used = 0;
  for (const auto& s : grid) used += s.empty() ? 0 : 1;
  for (int s = 0; s < slots; ++s) {
    // Empty slots are interchangeable: only try the first one.
    if (grid[s].empty() && s > used) break;
    if (static_cast<int>(grid[s].size()) >= ch.n_subchannels) continue;
    const int z = static_cast<int>(grid[s].size());
    const Transmission t = ToTransmission(packets[i], z, positions);
    if (!SlotAccepts(grid[s], t, ch.interference_radius_m)) continue;
    grid[s].push_back(t);
    if (Place(i + 1, slots, grid, packets, ch, positions)) return true;
    grid[s].pop_back();
  }
  return false;
}

}  // namespace

std::optional<FusionCostModel> fusion_preset(std::string_view name) {
  if (name == "cobevt") return FusionCostModel{2228e6};
  if (name == "where2comm") return FusionCostModel{1400e6};
  if (name == "coalign") return FusionCostModel{2684e6};
  return std::nullopt;
}

std::vector<Packet> build_packets(const Assignment& assignment,
                                  double feature_bits) {
  std::vector<Packet> out;
  for (const auto& [area, g] : assignment.groups) {
    for (int m : g.members) {
      if (m == g.leader) continue;
      out.push_back({m, g.leader, area, std::nullopt, std::nullopt, feature_bits});
    }
  }
  return out;
}

std::vector<AreaTask> fusion_tasks(const Assignment& assignment) {
  std::vector<AreaTask> out;
  for (const auto& [area, g] : assignment.groups) {
    out.push_back({area, g.leader, g.size()});
  }
  return out;
}

std::vector<std::size_t> priority_order(std::span<const Packet> packets) {
  return RankByLoad(packets, std::vector<bool>(packets.size(), true));
}

double area_fusion_time(const ScheduleInputs& in, int leader, int group_size) {
  auto it = in.compute_flops.find(leader);
  if (it == in.compute_flops.end() || !(it->second > 0.0)) {
    throw InvalidArgumentError("no compute capacity for CAV " +
                               std::to_string(leader));
  }
  return in.fusion.flops_full_fusion * group_size *
         (in.feature_bits / in.full_feature_bits) / it->second;
}

Schedule schedule(std::span<const Packet> packets,
                  std::span<const AreaTask> tasks, const ScheduleInputs& in) {
  CheckInputs(packets, tasks, in);
  return RunSlots(packets, tasks, in, priority_order(packets),
                  in.priority_mode == PriorityMode::kDynamic);
}

Schedule schedule_random(std::span<const Packet> packets,
                         std::span<const AreaTask> tasks,
                         const ScheduleInputs& in, std::uint64_t seed) {
  CheckInputs(packets, tasks, in);
  std::vector<std::size_t> order(packets.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed({seed, 0x72616e64ULL}));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  return RunSlots(packets, tasks, in, std::move(order), false);
}

int brute_force_schedule(std::span<const Packet> packets,
                         const ChannelParams& channel,
                         const std::map<int, Point2>& positions) {
  if (static_cast<int>(packets.size()) > kOracleMaxPackets ||
      channel.n_subchannels > kOracleMaxSubchannels) {
    throw RefusalError("schedule oracle limited to 8 packets and 3 subchannels");
  }
  if (packets.empty()) return 0;
  const std::vector<Packet> list(packets.begin(), packets.end());
  const int n = static_cast<int>(list.size());
  const int lower = (n + channel.n_subchannels - 1) / channel.n_subchannels;
  for (int slots = lower; slots <= n; ++slots) {
    std::vector<std::vector<Transmission>> grid(slots);
    if (Place(0, slots, grid, list, channel, positions)) return slots;
  }
  return n;
}

std::optional<std::string> find_schedule_violation(
    const Schedule& s, const ChannelParams& channel,
    const std::map<int, Point2>& positions) {
  std::map<int, std::vector<Transmission>> by_slot;
  std::map<std::pair<int, int>, int> used;
  for (const Packet& p : s.packets) {
    if (!p.placed()) return "unplaced packet in schedule";
    if (*p.slot < 0 || *p.slot >= s.makespan_slots) return "slot out of range";
    if (*p.subchannel < 0 || *p.subchannel >= channel.n_subchannels) {
      return "subchannel out of range";
    }
    if (++used[{*p.slot, *p.subchannel}] > 1) {
      return "two packets share subchannel " + std::to_string(*p.subchannel) +
             " in slot " + std::to_string(*p.slot);
    }
    const Transmission t = ToTransmission(p, *p.subchannel, positions);
    for (const Transmission& q : by_slot[*p.slot]) {
      if (pair_conflicts(t, q, channel.interference_radius_m)) {
        return "conflict in slot " + std::to_string(*p.slot) + ": " +
               std::to_string(t.src) + "->" + std::to_string(t.dst) + " vs " +
               std::to_string(q.src) + "->" + std::to_string(q.dst);
      }
    }
    by_slot[*p.slot].push_back(t);
  }
  return std::nullopt;
}

nlohmann::json schedule_to_json(const Schedule& s) {
  nlohmann::json packets = nlohmann::json::array();
  for (const Packet& p : s.packets) {
    packets.push_back({{"src", p.src},
                       {"dst", p.dst},
                       {"area", p.area},
                       {"subchannel", p.subchannel.value_or(-1)},
                       {"slot", p.slot.value_or(-1)}});
  }
  nlohmann::json completion = nlohmann::json::array();
  for (const auto& [area, slot] : s.area_complete_slot) {
    completion.push_back({{"area_id", area},
                          {"complete_slot", slot},
                          {"fusion_end_s", s.area_fusion_end_s.count(area)
                                               ? s.area_fusion_end_s.at(area)
                                               : 0.0}});
  }
  return {{"packets", std::move(packets)},
          {"makespan_slots", s.makespan_slots},
          {"tau_s", s.tau_s},
          {"joint_latency_s", s.joint_latency_s},
          {"per_area_completion", std::move(completion)}};
}

}  // namespace lgcp
