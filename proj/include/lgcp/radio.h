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

#ifndef LGCP_RADIO_H_
#define LGCP_RADIO_H_

#include <cstdint>
#include <span>

#include "json.hpp"
#include "lgcp/geometry.h"

namespace lgcp {

// Sidelink channel configuration. Field names and units follow the usual
// transmission-parameter table: GHz, MHz, dBm, dB, Mbps, metres.
struct ChannelParams {
  double carrier_ghz = 5.9;
  double bandwidth_total_mhz = 40.0;
  int n_subchannels = 5;
  double subchannel_bw_mhz = 8.0;
  double tx_power_dbm = 23.0;
  double noise_power_dbm = -114.0;
  double pathloss_a_db = 128.1;
  double pathloss_b_db = 36.6;
  double shadow_sigma_db = 8.0;
  double rate_gate_mbps = 27.0;
  double fixed_rate_mbps = 27.0;
  double interference_radius_m = 200.0;
  double min_distance_m = 1.0;

  double fixed_rate_bps() const { return fixed_rate_mbps * 1e6; }
  double rate_gate_bps() const { return rate_gate_mbps * 1e6; }
};

// Throws InvalidArgumentError when the parameters are inconsistent.
void validate_channel(const ChannelParams& params);
nlohmann::json channel_to_json(const ChannelParams& params);
// Missing fields keep their defaults. Throws ParseError / InvalidArgumentError.
ChannelParams channel_from_json(const nlohmann::json& doc);

// Node id used for the roadside unit in link computations.
inline constexpr int kRsuId = -1;

struct LinkState {
  int src = 0;
  int dst = 0;
  double distance_m = 0.0;
  double shadowing_db = 0.0;
  double achievable_bps = 0.0;
  bool feasible = false;
  double rate_bps = 0.0;  // fixed rate when feasible, else 0

  friend bool operator==(const LinkState&, const LinkState&) = default;
};

// a + b * log10(d_km), with d floored at `min_distance_m`.
// Throws InvalidArgumentError on a non-positive distance.
double path_loss_db(double distance_m, const ChannelParams& params = {});

// Shannon capacity of one subchannel at the resulting SNR.
double achievable_rate_bps(const ChannelParams& params, double distance_m,
                           double shadowing_db);

// Block shadowing of the unordered pair {a, b}: N(0, sigma) in dB, fixed for
// a given seed.
double link_shadowing_db(const ChannelParams& params, int a, int b,
                         std::uint64_t seed);

LinkState link_state(const ChannelParams& params, int src, const Point2& src_pos,
                     int dst, const Point2& dst_pos, std::uint64_t seed);

// One transmission as seen by the interference model.
struct Transmission {
  int src = 0;
  int dst = 0;
  Point2 src_pos;
  Point2 dst_pos;
  int subchannel = 0;
};

// The interference predicate: true when `candidate` cannot share a slot
// with `placed`. Two transmissions collide if they share any endpoint (one
// transmitter, half duplex, one reception per node) or, on the same
// subchannel, if either transmitter is within `interference_radius_m` of the
// other's receiver.
bool conflicts(const Transmission& candidate,
               std::span<const Transmission> placed,
               double interference_radius_m);

bool pair_conflicts(const Transmission& a, const Transmission& b,
                    double interference_radius_m);

}  // namespace lgcp

#endif  // LGCP_RADIO_H_
