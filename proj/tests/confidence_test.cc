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

#include "lgcp/confidence.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "lgcp/assignment.h"
#include "lgcp/error.h"
#include "lgcp/rng.h"

namespace lgcp {
namespace {

Scenario OneCav(Point2 cav, std::vector<Point2> background) {
  Scenario s;
  s.cavs = {CavState{0, cav}};
  s.background = std::move(background);
  s.grid = mark_occupancy(build_grid(280, 80, 10, 6), s.vehicle_positions());
  return s;
}

// Walks the segment between grid-line crossings and asks which cell holds
// each sub-interval midpoint.
int CrossedOccupiedCells(const RoiGrid& g, Point2 a, int target) {
  const Point2 b = g.cell_center(target);
  std::vector<double> ts{0.0, 1.0};
  const auto add_crossings = [&](double from, double to, double origin,
                                 double step, int count) {
    if (from == to) return;
    for (int k = 0; k <= count; ++k) {
      const double line = origin + k * step;
      const double t = (line - from) / (to - from);
      if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
  };
  add_crossings(a.x, b.x, g.origin().x, g.cell_w(), g.cols());
  add_crossings(a.y, b.y, g.origin().y, g.cell_h(), g.rows());
  std::sort(ts.begin(), ts.end());
  const auto own = g.cell_of(a);
  std::set<int> hit;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] - ts[i - 1] <= 1e-12) continue;
    const double t = 0.5 * (ts[i] + ts[i - 1]);
    const auto c = g.cell_of({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    if (!c || *c == target || (own && *c == *own)) continue;
    if (g.is_occupied(*c)) hit.insert(*c);
  }
  return static_cast<int>(hit.size());
}

TEST(SyntheticConfidenceTest, CenteredCavNoNoiseGivesBase) {
  const Scenario s = OneCav({5, 3}, {});
  SyntheticConfidenceParams p;
  p.noise_sigma = 0.0;
  const ConfidenceMap m = synthetic_confidence(s, p, 1);
  ASSERT_EQ(m.n_areas(), 1);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 0.9);
}

TEST(SyntheticConfidenceTest, OneDecayLength) {
  // CAV at (5, 3); background vehicle centered 60 m away in cell (6, 0).
  const Scenario s = OneCav({5, 3}, {{65, 3}});
  SyntheticConfidenceParams p;
  p.base = 1.0;
  p.noise_sigma = 0.0;
  const ConfidenceMap m = synthetic_confidence(s, p, 1);
  EXPECT_NEAR(m.at(6, 0), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(m.at(6, 0), 0.3679, 5e-5);
}

TEST(SyntheticConfidenceTest, OneOccluderHalves) {
  // Target cell 2 sits behind occupied cell 1 on the same row.
  Scenario s = OneCav({5, 3}, {{15, 3}, {25, 3}});
  SyntheticConfidenceParams p;
  p.base = 1.0;
  p.decay_length_m = 1e12;
  p.occlusion_penalty = 0.5;
  p.noise_sigma = 0.0;
  EXPECT_EQ(occluding_cells(s.grid, s.cavs[0].position, 2), 1);
  const ConfidenceMap m = synthetic_confidence(s, p, 1);
  EXPECT_NEAR(m.at(2, 0), 0.5, 1e-9);
  EXPECT_NEAR(m.at(1, 0), 1.0, 1e-9);
}

TEST(SyntheticConfidenceTest, OccluderCountMatchesTraversalOracle) {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Point2> bg;
    const int n = static_cast<int>(rng.below(40));
    for (int i = 0; i < n; ++i) bg.push_back({rng.uniform(0, 280), rng.uniform(0, 80)});
    const Point2 cav{rng.uniform(0, 280), rng.uniform(0, 80)};
    const Scenario s = OneCav(cav, bg);
    for (int target : s.grid.occupied_cells()) {
      EXPECT_EQ(occluding_cells(s.grid, cav, target),
                CrossedOccupiedCells(s.grid, cav, target))
          << "trial " << trial << " target " << target;
    }
  }
}

TEST(SyntheticConfidenceTest, DeterministicAndBounded) {
  const Scenario s = generate_scenario(4, 5, 10, GridSpec{});
  SyntheticConfidenceParams p;
  p.noise_sigma = 0.3;
  const ConfidenceMap a = synthetic_confidence(s, p, 17);
  EXPECT_EQ(a, synthetic_confidence(s, p, 17));
  EXPECT_NE(a, synthetic_confidence(s, p, 18));
  for (int r = 0; r < a.n_areas(); ++r) {
    for (int c = 0; c < a.n_cavs(); ++c) {
      EXPECT_GE(a.value(r, c), 0.0);
      EXPECT_LE(a.value(r, c), 1.0);
    }
  }
}

TEST(SyntheticConfidenceTest, RejectsBadParams) {
  SyntheticConfidenceParams p;
  p.base = 1.5;
  EXPECT_THROW(validate_params(p), InvalidArgumentError);
  p = {};
  p.decay_length_m = 0;
  EXPECT_THROW(validate_params(p), InvalidArgumentError);
  p = {};
  p.noise_sigma = -1;
  EXPECT_THROW(validate_params(p), InvalidArgumentError);
}

TEST(ConfidenceMapTest, ValidatesShapeAndRange) {
  EXPECT_THROW(ConfidenceMap({1, 2}, {0}, {0.5}), ValidationError);
  EXPECT_THROW(ConfidenceMap({1}, {0}, {1.2}), ValidationError);
  EXPECT_THROW(ConfidenceMap({2, 1}, {0}, {0.1, 0.2}), ValidationError);
  const ConfidenceMap m({3, 7}, {0, 4}, {0.1, 0.2, 0.3, 0.4});
  EXPECT_DOUBLE_EQ(m.at(7, 0), 0.3);
  EXPECT_DOUBLE_EQ(m.at(3, 4), 0.2);
  EXPECT_FALSE(m.area_row(5).has_value());
}

TEST(ConfidenceCsvTest, RoundTripAndErrors) {
  const Scenario s = generate_scenario(2, 3, 4, GridSpec{});
  const ConfidenceMap m = synthetic_confidence(s, {}, 5);
  EXPECT_EQ(parse_confidence_csv(confidence_to_csv(m), s), m);

  std::string text = confidence_to_csv(m);
  std::string bad = text;
  bad.replace(0, bad.find(','), "1.2");
  EXPECT_THROW(parse_confidence_csv(bad, s), ValidationError);
  std::string short_rows = text.substr(0, text.find('\n') + 1);
  EXPECT_THROW(parse_confidence_csv(short_rows, s), ValidationError);
  std::string junk = text;
  junk.replace(0, junk.find(','), "abc");
  EXPECT_THROW(parse_confidence_csv(junk, s), ParseError);
}

TEST(GroupConfidenceTest, Examples) {
  const ConfidenceMap m({0}, {0, 1, 2}, {0.3, 0.4, 0.5});
  const std::vector<int> one{0};
  EXPECT_DOUBLE_EQ(group_confidence(ConfidenceMap({0}, {0}, {0.9}), 0, one), 0.9);
  const ConfidenceMap half({0}, {0, 1}, {0.5, 0.5});
  const std::vector<int> both{0, 1};
  EXPECT_DOUBLE_EQ(group_confidence(half, 0, both), 0.75);
  const std::vector<int> all{0, 1, 2};
  EXPECT_NEAR(group_confidence(m, 0, all), 1 - 0.7 * 0.6 * 0.5, 1e-15);
  EXPECT_NEAR(group_confidence(m, 0, all), 0.79, 1e-12);
}

TEST(GroupConfidenceTest, MonotoneBoundedSubmodular) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    std::vector<int> ids(n);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
      ids[i] = i;
      vals[i] = rng.uniform();
    }
    const ConfidenceMap m({0}, ids, vals);
    // Random nested sets small ⊆ big, and an outside element v.
    std::vector<int> small, big;
    const int v = static_cast<int>(rng.below(n));
    for (int i = 0; i < n; ++i) {
      if (i == v) continue;
      const double u = rng.uniform();
      if (u < 0.3) small.push_back(i);
      if (u < 0.7) big.push_back(i);
    }
    if (small.empty() || big.empty()) continue;
    const double f_small = group_confidence(m, 0, small);
    const double f_big = group_confidence(m, 0, big);
    std::vector<int> small_v = small, big_v = big;
    small_v.push_back(v);
    big_v.push_back(v);
    const double g_small = group_confidence(m, 0, small_v) - f_small;
    const double g_big = group_confidence(m, 0, big_v) - f_big;
    EXPECT_GE(g_small, -1e-15);
    EXPECT_LE(g_big, g_small + 1e-12);
    double max_member = 0;
    for (int i : big) max_member = std::max(max_member, vals[i]);
    EXPECT_GE(f_big, max_member - 1e-15);
    EXPECT_LE(f_big, 1.0);
  }
}

TEST(GlobalConfidenceTest, MeansOverAllAreas) {
  const ConfidenceMap m({0, 1, 2}, {0}, {1.0, 0.5, 0.0});
  Assignment none;
  EXPECT_DOUBLE_EQ(global_confidence(m, none), 0.0);
  Assignment a;
  a.groups[0] = Group{0, {0}, 0};
  a.groups[1] = Group{1, {0}, 0};
  EXPECT_DOUBLE_EQ(global_confidence(m, a), 0.5);

  const ConfidenceMap two({0, 1}, {0}, {0.8, 0.6});
  Assignment b;
  b.groups[0] = Group{0, {0}, 0};
  b.groups[1] = Group{1, {0}, 0};
  EXPECT_DOUBLE_EQ(global_confidence(two, b), 0.7);
}

}  // namespace
}  // namespace lgcp
