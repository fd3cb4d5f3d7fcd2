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

#include "lgcp/radio.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lgcp/error.h"
#include "lgcp/rng.h"

namespace lgcp {

void validate_channel(const ChannelParams& p) {
  if (p.n_subchannels < 1) throw InvalidArgumentError("need >= 1 subchannel");
  if (!(p.subchannel_bw_mhz > 0.0) ||
      p.subchannel_bw_mhz * p.n_subchannels > p.bandwidth_total_mhz + 1e-9) {
    throw InvalidArgumentError("subchannels exceed the total bandwidth");
  }
  if (!(p.fixed_rate_mbps > 0.0) || p.rate_gate_mbps != p.fixed_rate_mbps) {
    throw InvalidArgumentError("rate gate must equal the positive fixed rate");
  }
  if (!(p.interference_radius_m >= 0.0) || !(p.min_distance_m > 0.0) ||
      !(p.shadow_sigma_db >= 0.0)) {
    throw InvalidArgumentError("bad radius, distance floor or shadowing sigma");
  }
}

nlohmann::json channel_to_json(const ChannelParams& p) {
  return {{"carrier_ghz", p.carrier_ghz},
          {"bandwidth_total_mhz", p.bandwidth_total_mhz},
          {"n_subchannels", p.n_subchannels},
          {"subchannel_bw_mhz", p.subchannel_bw_mhz},
          {"tx_power_dbm", p.tx_power_dbm},
          {"noise_power_dbm", p.noise_power_dbm},
          {"pathloss_a_db", p.pathloss_a_db},
          {"pathloss_b_db", p.pathloss_b_db},
          {"shadow_sigma_db", p.shadow_sigma_db},
          {"rate_gate_mbps", p.rate_gate_mbps},
          {"fixed_rate_mbps", p.fixed_rate_mbps},
          {"interference_radius_m", p.interference_radius_m},
          {"min_distance_m", p.min_distance_m}};
}

ChannelParams channel_from_json(const nlohmann::json& doc) {
  ChannelParams p;
  try {
    p.carrier_ghz = doc.value("carrier_ghz", p.carrier_ghz);
    p.bandwidth_total_mhz =
        doc.value("bandwidth_total_mhz", p.bandwidth_total_mhz);
    p.n_subchannels = doc.value("n_subchannels", p.n_subchannels);
    p.subchannel_bw_mhz = doc.value("subchannel_bw_mhz", p.subchannel_bw_mhz);
    p.tx_power_dbm = doc.value("tx_power_dbm", p.tx_power_dbm);
    p.noise_power_dbm = doc.value("noise_power_dbm", p.noise_power_dbm);
    p.pathloss_a_db = doc.value("pathloss_a_db", p.pathloss_a_db);
    p.pathloss_b_db = doc.value("pathloss_b_db", p.pathloss_b_db);
    p.shadow_sigma_db = doc.value("shadow_sigma_db", p.shadow_sigma_db);
    p.rate_gate_mbps = doc.value("rate_gate_mbps", p.rate_gate_mbps);
    p.fixed_rate_mbps = doc.value("fixed_rate_mbps", p.fixed_rate_mbps);
    p.interference_radius_m =
        doc.value("interference_radius_m", p.interference_radius_m);
    p.min_distance_m = doc.value("min_distance_m", p.min_distance_m);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed channel block: ") + e.what());
  }
  validate_channel(p);
  return p;
}

double path_loss_db(double distance_m, const ChannelParams& p) {
  if (!(distance_m > 0.0)) {
    throw InvalidArgumentError("path loss needs a positive distance");
  }
  const double d_km = std::max(distance_m, p.min_distance_m) / 1000.0;
  return p.pathloss_a_db + p.pathloss_b_db * std::log10(d_km);
}

double achievable_rate_bps(const ChannelParams& p, double distance_m,
                           double shadowing_db) {
  const double snr_db = p.tx_power_dbm - path_loss_db(distance_m, p) -
                        shadowing_db - p.noise_power_dbm;
  return p.subchannel_bw_mhz * 1e6 * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

double link_shadowing_db(const ChannelParams& p, int a, int b,
                         std::uint64_t seed) {
  const auto lo = static_cast<std::uint64_t>(static_cast<std::int64_t>(std::min(a, b)));
  const auto hi = static_cast<std::uint64_t>(static_cast<std::int64_t>(std::max(a, b)));
  Rng rng(derive_seed({seed, 0x736861646fULL, lo, hi}));
  return rng.normal(0.0, p.shadow_sigma_db);
}

LinkState link_state(const ChannelParams& p, int src, const Point2& src_pos,
                     int dst, const Point2& dst_pos, std::uint64_t seed) {
  LinkState s;
  s.src = src;
  s.dst = dst;
  s.distance_m = distance(src_pos, dst_pos);
  s.shadowing_db = link_shadowing_db(p, src, dst, seed);
  s.achievable_bps = achievable_rate_bps(
      p, std::max(s.distance_m, p.min_distance_m), s.shadowing_db);
  s.feasible = s.achievable_bps >= p.rate_gate_bps();
  s.rate_bps = s.feasible ? p.fixed_rate_bps() : 0.0;
  return s;
}

bool pair_conflicts(const Transmission& a, const Transmission& b,
                    double radius) {
  if (a.src == b.src || a.src == b.dst || a.dst == b.src || a.dst == b.dst) {
    return true;
  }
  if (a.subchannel != b.subchannel) return false;
  return distance(b.src_pos, a.dst_pos) <= radius ||
         distance(a.src_pos, b.dst_pos) <= radius;
}

bool conflicts(const Transmission& candidate,
               std::span<const Transmission> placed, double radius) {
  return std::any_of(placed.begin(), placed.end(), [&](const Transmission& q) {
    return pair_conflicts(candidate, q, radius);
  });
}

}  // namespace lgcp
