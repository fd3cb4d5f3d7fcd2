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

#ifndef LGCP_ASSIGNMENT_H_
#define LGCP_ASSIGNMENT_H_

#include <map>
#include <vector>

#include "json.hpp"
#include "lgcp/confidence.h"

namespace lgcp {

// The CAVs assigned to one area. `members` keeps admission order (highest
// single-CAV confidence first); `leader` is one of them.
struct Group {
  int area_id = 0;
  std::vector<int> members;
  int leader = 0;

  int size() const { return static_cast<int>(members.size()); }
  friend bool operator==(const Group&, const Group&) = default;
};

struct Assignment {
  std::map<int, Group> groups;  // keyed by area id
  std::map<int, double> loads;  // fusion load in bits, every CAV present

  double max_load() const;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Fusion load per CAV: for every group it leads, |members| * feature_bits.
// Every id in `cav_ids` appears in the result, possibly with zero load.
std::map<int, double> compute_loads(const std::map<int, Group>& groups,
                                    std::span<const int> cav_ids,
                                    double feature_bits);

// Checks leader membership, duplicate members, the load identity and that
// every group's area belongs to the map. Throws ValidationError.
void validate_assignment(const Assignment& assignment,
                         const ConfidenceMap& map, double feature_bits);

// Greedy group construction followed by min-load leader designation.
//
// Per area, CAVs are scanned by descending confidence (ties: ascending id)
// and admitted while the marginal gain of the group confidence is at least
// `delta_g`; the scan stops at the first rejection. A CAV with zero
// confidence is never admitted. Groups are then visited by descending size
// (ties: ascending area id) and led by the member with the smallest current
// load (ties: ascending id).
//
// Throws InvalidArgumentError if delta_g is outside [0, 1] or
// feature_bits <= 0.
Assignment select_groups(const ConfidenceMap& map, double delta_g,
                         double feature_bits);

// Exhaustive reference for select_groups on small instances.
//
// For each area, every member subset is enumerated and kept iff it is
// consistent with full-scan filtering: walking all CAVs in descending
// confidence order, a CAV is in the subset exactly when its gain over the
// subset members ranked before it is >= delta_g. Leaders are then chosen by
// enumerating every leader vector and keeping one of minimal maximum load
// (lexicographically first on ties).
//
// Throws RefusalError above 6 CAVs or 6 areas.
Assignment brute_force_groups(const ConfidenceMap& map, double delta_g,
                              double feature_bits, int max_group_size);

inline constexpr int kOracleMaxCavs = 6;
inline constexpr int kOracleMaxAreas = 6;

nlohmann::json assignment_to_json(const Assignment& assignment);

}  // namespace lgcp

#endif  // LGCP_ASSIGNMENT_H_
