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

#ifndef LGCP_CONFIDENCE_H_
#define LGCP_CONFIDENCE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgcp/geometry.h"
#include "lgcp/scenario.h"

namespace lgcp {

struct Assignment;

// Per-(area, CAV) confidence that a single CAV perceives an area correctly.
// Rows are areas in ascending cell order, columns are CAV ids ascending.
class ConfidenceMap {
 public:
  ConfidenceMap() = default;
  // Throws ValidationError on a shape mismatch, a duplicate id or a value
  // outside [0, 1].
  ConfidenceMap(std::vector<int> area_ids, std::vector<int> cav_ids,
                std::vector<double> values);

  int n_areas() const { return static_cast<int>(area_ids_.size()); }
  int n_cavs() const { return static_cast<int>(cav_ids_.size()); }
  std::span<const int> area_ids() const { return area_ids_; }
  std::span<const int> cav_ids() const { return cav_ids_; }

  double value(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * cav_ids_.size() + col];
  }
  // Throws InvalidArgumentError for unknown ids.
  double at(int area_id, int cav_id) const;

  std::optional<int> area_row(int area_id) const;
  std::optional<int> cav_col(int cav_id) const;

  friend bool operator==(const ConfidenceMap&, const ConfidenceMap&) = default;

 private:
  std::vector<int> area_ids_;
  std::vector<int> cav_ids_;
  std::vector<double> values_;
};

struct SyntheticConfidenceParams {
  double base = 0.9;
  double decay_length_m = 60.0;
  double occlusion_penalty = 0.7;
  double noise_sigma = 0.02;
};

// Throws InvalidArgumentError when a parameter is out of its domain.
void validate_params(const SyntheticConfidenceParams& params);

// Occupied cells crossed by the open segment from `from` to the centre of
// `target_cell`, not counting the target cell or the cell holding `from`.
// Grazing a corner or an edge does not count as crossing.
int occluding_cells(const RoiGrid& grid, const Point2& from, int target_cell);

// Distance / occlusion model standing in for a learned confidence decoder:
// base * exp(-d / decay) * penalty^k + noise, clamped to [0, 1].
ConfidenceMap synthetic_confidence(const Scenario& scenario,
                                   const SyntheticConfidenceParams& params,
                                   std::uint64_t seed);

// CSV without header: one row per occupied area (ascending cell index), one
// column per CAV (ascending id). Throws IoError, ParseError or
// ValidationError.
ConfidenceMap load_confidence(const std::filesystem::path& path,
                              const Scenario& scenario);
ConfidenceMap parse_confidence_csv(const std::string& text,
                                   const Scenario& scenario);
std::string confidence_to_csv(const ConfidenceMap& map);

// Probability that at least one member perceives the area:
// 1 - prod(1 - F_k). Throws InvalidArgumentError on an empty or unknown
// member set.
double group_confidence(const ConfidenceMap& map, int area_id,
                        std::span<const int> members);

// Mean group confidence over all areas of the map. Areas without a group
// contribute zero.
double global_confidence(const ConfidenceMap& map,
                         const Assignment& assignment);

}  // namespace lgcp

#endif  // LGCP_CONFIDENCE_H_
