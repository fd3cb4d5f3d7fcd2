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

#include "lgcp/geometry.h"

#include <algorithm>

namespace lgcp {

double segment_box_overlap(const Point2& a, const Point2& b, const Box& box) {
  double t_enter = 0.0;
  double t_exit = 1.0;
  const double d[2] = {b.x - a.x, b.y - a.y};
  const double o[2] = {a.x, a.y};
  const double lo[2] = {box.min_x, box.min_y};
  const double hi[2] = {box.max_x, box.max_y};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      // Parallel to this slab: inside strictly or not at all.
      if (o[axis] <= lo[axis] || o[axis] >= hi[axis]) return 0.0;
      continue;
    }
    double t0 = (lo[axis] - o[axis]) / d[axis];
    double t1 = (hi[axis] - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter >= t_exit) return 0.0;
  }
  return t_exit - t_enter;
}

}  // namespace lgcp
