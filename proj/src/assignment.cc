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

#include "lgcp/assignment.h"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <string>

#include "lgcp/error.h"

namespace lgcp {
namespace {

// CAV columns of `row` by descending confidence, ties by ascending id.
std::vector<int> RankedColumns(const ConfidenceMap& map, int row) {
  std::vector<int> cols(map.n_cavs());
  std::iota(cols.begin(), cols.end(), 0);
  std::stable_sort(cols.begin(), cols.end(), [&](int a, int b) {
    return map.value(row, a) > map.value(row, b);
  });
  return cols;
}

// Leader designation over groups visited largest first.
void AssignLeaders(std::map<int, Group>& groups, std::span<const int> cav_ids,
                   double feature_bits) {
  std::vector<Group*> order;
  for (auto& [area, g] : groups) order.push_back(&g);
  std::stable_sort(order.begin(), order.end(), [](const Group* a,
                                                  const Group* b) {
    return a->size() > b->size();
  });
  std::map<int, double> load;
  for (int id : cav_ids) load[id] = 0.0;
  for (Group* g : order) {
    int best = g->members.front();
    for (int id : g->members) {
      if (load[id] < load[best] || (load[id] == load[best] && id < best)) {
        best = id;
      }
    }
    g->leader = best;
    load[best] += g->size() * feature_bits;
  }
}

}  // namespace

double Assignment::max_load() const {
  double m = 0.0;
  for (const auto& [id, l] : loads) m = std::max(m, l);
  return m;
}

std::map<int, double> compute_loads(const std::map<int, Group>& groups,
                                    std::span<const int> cav_ids,
                                    double feature_bits) {
  std::map<int, double> loads;
  for (int id : cav_ids) loads[id] = 0.0;
  // Accumulate in leader-visit order so the sums match select_groups.
  std::vector<const Group*> order;
  for (const auto& [area, g] : groups) order.push_back(&g);
  std::stable_sort(order.begin(), order.end(),
                   [](const Group* a, const Group* b) {
                     return a->size() > b->size();
                   });
  for (const Group* g : order) loads[g->leader] += g->size() * feature_bits;
  return loads;
}

void validate_assignment(const Assignment& a, const ConfidenceMap& map,
                         double feature_bits) {
  for (const auto& [area, g] : a.groups) {
    if (g.area_id != area) throw ValidationError("group keyed under wrong area");
    if (!map.area_row(area)) {
      throw ValidationError("group for unoccupied area " + std::to_string(area));
    }
    if (g.members.empty()) throw ValidationError("empty group");
    std::set<int> seen;
    for (int id : g.members) {
      if (!map.cav_col(id)) {
        throw ValidationError("unknown CAV " + std::to_string(id));
      }
      if (!seen.insert(id).second) {
        throw ValidationError("duplicate member " + std::to_string(id));
      }
    }
    if (!seen.contains(g.leader)) {
      throw ValidationError("leader is not a member of area " +
                            std::to_string(area));
    }
  }
  if (compute_loads(a.groups, map.cav_ids(), feature_bits) != a.loads) {
    throw ValidationError("stored loads disagree with group leaders");
  }
}

Assignment select_groups(const ConfidenceMap& map, double delta_g,
                         double feature_bits) {
  if (!(delta_g >= 0.0 && delta_g <= 1.0)) {
    throw InvalidArgumentError("delta_g must lie in [0, 1]");
  }
  if (!(feature_bits > 0.0)) {
    throw InvalidArgumentError("feature size must be positive");
  }
  Assignment out;
  for (int row = 0; row < map.n_areas(); ++row) {
    const int area = map.area_ids()[row];
    Group g;
    g.area_id = area;
    double miss = 1.0;
    for (int col : RankedColumns(map, row)) {
      const double f = map.value(row, col);
      const double gain = (1.0 - miss * (1.0 - f)) - (1.0 - miss);
      // Gains along this order never increase, so the first rejection ends
      // the scan.
      if (f <= 0.0 || gain < delta_g) break;
      miss *= 1.0 - f;
      g.members.push_back(map.cav_ids()[col]);
    }
    if (!g.members.empty()) out.groups.emplace(area, std::move(g));
  }
  AssignLeaders(out.groups, map.cav_ids(), feature_bits);
  out.loads = compute_loads(out.groups, map.cav_ids(), feature_bits);
  return out;
}

Assignment brute_force_groups(const ConfidenceMap& map, double delta_g,
                              double feature_bits, int max_group_size) {
  if (map.n_cavs() > kOracleMaxCavs || map.n_areas() > kOracleMaxAreas) {
    throw RefusalError("oracle instance too large: " +
                       std::to_string(map.n_cavs()) + " CAVs, " +
                       std::to_string(map.n_areas()) + " areas");
  }
  if (!(delta_g >= 0.0 && delta_g <= 1.0) || !(feature_bits > 0.0)) {
    throw InvalidArgumentError("bad oracle parameters");
  }
  const int n = map.n_cavs();
  Assignment out;
  for (int row = 0; row < map.n_areas(); ++row) {
    const int area = map.area_ids()[row];
    // Independent ranking: pairs sorted by (-value, id).
    std::vector<std::pair<double, int>> rank;
    for (int c = 0; c < n; ++c) rank.push_back({-map.value(row, c), map.cav_ids()[c]});
    std::sort(rank.begin(), rank.end());

    std::vector<int> best;
    int consistent = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (std::popcount(mask) > max_group_size) continue;
      std::vector<int> prior;
      bool ok = true;
      for (int r = 0; r < n && ok; ++r) {
        const int id = rank[r].second;
        const int col = *map.cav_col(id);
        const bool in = (mask >> col) & 1u;
        const double before =
            prior.empty() ? 0.0 : group_confidence(map, area, prior);
        std::vector<int> with = prior;
        with.push_back(id);
        const double gain = group_confidence(map, area, with) - before;
        const bool admissible = -rank[r].first > 0.0 && gain >= delta_g;
        if (in != admissible) ok = false;
        if (in) prior = std::move(with);
      }
      if (!ok) continue;
      ++consistent;
      if (prior.size() > best.size() || consistent == 1) best = prior;
    }
    if (consistent == 0) {
      throw RefusalError("no admissible group within max_group_size for area " +
                         std::to_string(area));
    }
    if (!best.empty()) out.groups.emplace(area, Group{area, best, best.front()});
  }

  // Exhaustive leader vectors, groups in area order.
  std::vector<Group*> groups;
  for (auto& [area, g] : out.groups) groups.push_back(&g);
  const std::vector<int> ids(map.cav_ids().begin(), map.cav_ids().end());
  std::vector<std::size_t> pick(groups.size(), 0), best_pick = pick;
  long best_max = -1;
  while (true) {
    std::map<int, long> units;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      units[groups[i]->members[pick[i]]] += groups[i]->size();
    }
    long worst = 0;
    for (const auto& [id, u] : units) worst = std::max(worst, u);
    if (best_max < 0 || worst < best_max) {
      best_max = worst;
      best_pick = pick;
    }
    std::size_t i = 0;
    for (; i < groups.size(); ++i) {
      if (++pick[i] < groups[i]->members.size()) break;
      pick[i] = 0;
    }
    if (i == groups.size()) break;
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    groups[i]->leader = groups[i]->members[best_pick[i]];
  }
  out.loads = compute_loads(out.groups, ids, feature_bits);
  return out;
}

nlohmann::json assignment_to_json(const Assignment& a) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& [area, g] : a.groups) {
    groups.push_back(
        {{"area_id", area}, {"members", g.members}, {"leader", g.leader}});
  }
  nlohmann::json loads = nlohmann::json::array();
  for (const auto& [id, l] : a.loads) {
    loads.push_back({{"cav_id", id}, {"load_bits", l}});
  }
  return {{"groups", std::move(groups)}, {"loads", std::move(loads)}};
}

}  // namespace lgcp
