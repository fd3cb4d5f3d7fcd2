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

#include <cmath>

#include <gtest/gtest.h>

#include "lgcp/error.h"
#include "lgcp/rng.h"

namespace lgcp {
namespace {

TEST(PathLossTest, ReferenceDistances) {
  EXPECT_NEAR(path_loss_db(1000.0), 128.1, 1e-12);
  EXPECT_NEAR(path_loss_db(100.0), 91.5, 1e-12);
  EXPECT_NEAR(path_loss_db(10000.0), 164.7, 1e-12);
}

TEST(PathLossTest, FloorAndErrors) {
  EXPECT_DOUBLE_EQ(path_loss_db(0.2), path_loss_db(1.0));
  EXPECT_THROW(path_loss_db(0.0), InvalidArgumentError);
  EXPECT_THROW(path_loss_db(-3.0), InvalidArgumentError);
}

TEST(PathLossTest, StrictlyIncreasingAboveFloor) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(1.0, 5000.0);
    const double b = a + rng.uniform(1e-3, 100.0);
    EXPECT_LT(path_loss_db(a), path_loss_db(b));
  }
}

TEST(RateTest, ShannonAtHundredMeters) {
  const ChannelParams p;
  // SNR = 23 - 91.5 + 114 = 45.5 dB.
  const double expected = 8e6 * std::log2(1.0 + std::pow(10.0, 4.55));
  EXPECT_NEAR(achievable_rate_bps(p, 100.0, 0.0), expected, 1e-3);
  EXPECT_NEAR(achievable_rate_bps(p, 100.0, 0.0), 1.21e8, 0.005e8);
  EXPECT_NEAR(achievable_rate_bps(p, 100.0, 45.5), 8e6, 1e-6);
  EXPECT_LT(achievable_rate_bps(p, 1e9, 0.0), 1e-3);
}

TEST(LinkStateTest, GateAndFixedRate) {
  ChannelParams p;
  p.shadow_sigma_db = 0.0;
  const LinkState near = link_state(p, 0, {0, 0}, 1, {100, 0}, 5);
  EXPECT_TRUE(near.feasible);
  EXPECT_DOUBLE_EQ(near.rate_bps, 2.7e7);
  EXPECT_DOUBLE_EQ(near.distance_m, 100.0);
  // Far enough to fall below the gate.
  const LinkState far = link_state(p, 0, {0, 0}, 1, {1400, 0}, 5);
  EXPECT_LT(far.achievable_bps, 2.7e7);
  EXPECT_FALSE(far.feasible);
  EXPECT_DOUBLE_EQ(far.rate_bps, 0.0);
}

TEST(LinkStateTest, SymmetricAndDeterministicShadowing) {
  const ChannelParams p;
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const int a = static_cast<int>(rng.below(40)) - 1;
    const int b = static_cast<int>(rng.below(40)) - 1;
    const std::uint64_t seed = rng.next_u64();
    const Point2 pa{rng.uniform(0, 280), rng.uniform(0, 80)};
    const Point2 pb{rng.uniform(0, 280), rng.uniform(0, 80)};
    const LinkState ab = link_state(p, a, pa, b, pb, seed);
    const LinkState ba = link_state(p, b, pb, a, pa, seed);
    EXPECT_EQ(ab.shadowing_db, ba.shadowing_db);
    EXPECT_EQ(ab.feasible, ba.feasible);
    EXPECT_EQ(ab, link_state(p, a, pa, b, pb, seed));
  }
}

TEST(LinkStateTest, ShadowingLooksGaussian) {
  const ChannelParams p;
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double s = link_shadowing_db(p, 0, 1, static_cast<std::uint64_t>(i));
    sum += s;
    sq += s * s;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.2);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 8.0, 0.2);
}

Transmission Tx(int src, int dst, Point2 s, Point2 d, int z) {
  return Transmission{src, dst, s, d, z};
}

TEST(ConflictTest, Rules) {
  const Transmission a = Tx(0, 1, {0, 0}, {10, 0}, 0);
  // Shared transmitter on another subchannel.
  EXPECT_TRUE(pair_conflicts(a, Tx(0, 2, {0, 0}, {500, 0}, 3), 200));
  // Shared receiver.
  EXPECT_TRUE(pair_conflicts(a, Tx(2, 1, {900, 0}, {10, 0}, 4), 200));
  // Half duplex: a's receiver transmits.
  EXPECT_TRUE(pair_conflicts(a, Tx(1, 3, {10, 0}, {900, 0}, 2), 200));
  // Same subchannel, other transmitter 50 m from a's receiver.
  EXPECT_TRUE(pair_conflicts(a, Tx(2, 3, {60, 0}, {900, 0}, 0), 200));
  // Same geometry on another subchannel.
  EXPECT_FALSE(pair_conflicts(a, Tx(2, 3, {60, 0}, {900, 0}, 1), 200));
  // Same subchannel, everything far apart.
  EXPECT_FALSE(pair_conflicts(a, Tx(2, 3, {1000, 0}, {1300, 0}, 0), 200));
}

TEST(ConflictTest, SymmetricAndMonotone) {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Transmission> txs;
    const int n = 2 + static_cast<int>(rng.below(6));
    for (int i = 0; i < n; ++i) {
      const int s = static_cast<int>(rng.below(8));
      const int d = (s + 1 + static_cast<int>(rng.below(7))) % 8;
      txs.push_back(Tx(s, d, {rng.uniform(0, 600), rng.uniform(0, 80)},
                       {rng.uniform(0, 600), rng.uniform(0, 80)},
                       static_cast<int>(rng.below(3))));
    }
    const double r = rng.uniform(0, 300);
    EXPECT_EQ(pair_conflicts(txs[0], txs[1], r), pair_conflicts(txs[1], txs[0], r));
    const std::span<const Transmission> all(txs);
    for (std::size_t k = 1; k < txs.size(); ++k) {
      if (conflicts(txs[0], all.subspan(1, k - 1), r)) {
        EXPECT_TRUE(conflicts(txs[0], all.subspan(1, k), r));
      }
    }
  }
}

TEST(ChannelParamsTest, JsonRoundTripAndValidation) {
  ChannelParams p;
  p.n_subchannels = 3;
  p.interference_radius_m = 150;
  const ChannelParams q = channel_from_json(channel_to_json(p));
  EXPECT_EQ(channel_to_json(q), channel_to_json(p));
  ChannelParams bad;
  bad.n_subchannels = 6;
  EXPECT_THROW(validate_channel(bad), InvalidArgumentError);
  bad = {};
  bad.n_subchannels = 0;
  EXPECT_THROW(validate_channel(bad), InvalidArgumentError);
  EXPECT_THROW(channel_from_json({{"n_subchannels", "five"}}), ParseError);
}

TEST(ChannelParamsTest, DefaultsSplitBandwidthEvenly) {
  const ChannelParams p;
  EXPECT_EQ(p.n_subchannels, 5);
  EXPECT_DOUBLE_EQ(p.n_subchannels * p.subchannel_bw_mhz, p.bandwidth_total_mhz);
  EXPECT_DOUBLE_EQ(p.fixed_rate_bps(), 2.7e7);
}

}  // namespace
}  // namespace lgcp
