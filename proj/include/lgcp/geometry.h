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

#ifndef LGCP_GEOMETRY_H_
#define LGCP_GEOMETRY_H_

#include <cmath>

namespace lgcp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Axis-aligned box [min_x, max_x] x [min_y, max_y].
struct Box {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  Point2 center() const {
    return {(min_x + max_x) / 2.0, (min_y + max_y) / 2.0};
  }
  bool contains(const Point2& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Parametric overlap of the segment a + t(b - a), t in [0, 1], with `box`.
// Returns the length (in t units) of the overlapping interval, 0 when the
// segment misses the box or only grazes an edge or corner.
double segment_box_overlap(const Point2& a, const Point2& b, const Box& box);

}  // namespace lgcp

#endif  // LGCP_GEOMETRY_H_
