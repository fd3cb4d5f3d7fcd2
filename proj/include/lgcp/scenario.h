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

#ifndef LGCP_SCENARIO_H_
#define LGCP_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lgcp/geometry.h"

namespace lgcp {

// Partition of the region of interest into non-overlapping rectangular
// cells. Cells are indexed row-major: index = row * cols() + col, with row
// increasing along y. Cells on the far edges are clipped to the region when
// the extent is not a multiple of the cell size.
class RoiGrid {
 public:
  RoiGrid() = default;

  // Throws InvalidArgumentError on a non-positive or non-finite dimension.
  static RoiGrid Build(double width_m, double height_m, double cell_w,
                       double cell_h, Point2 origin = {});

  const Point2& origin() const { return origin_; }
  double width_m() const { return width_m_; }
  double height_m() const { return height_m_; }
  double cell_w() const { return cell_w_; }
  double cell_h() const { return cell_h_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  int cell_count() const { return cols_ * rows_; }

  Box bounds() const;
  bool contains(const Point2& p) const { return bounds().contains(p); }

  // Cell holding `p`; points on the shared edge of two cells belong to the
  // cell with the larger index, except on the far RoI boundary.
  std::optional<int> cell_of(const Point2& p) const;
  Box cell_bounds(int cell) const;
  Point2 cell_center(int cell) const { return cell_bounds(cell).center(); }

  const std::set<int>& occupied() const { return occupied_; }
  bool is_occupied(int cell) const { return occupied_.contains(cell); }
  // Occupied cell indices ascending; this is the area ordering used by
  // confidence maps and reports.
  std::vector<int> occupied_cells() const {
    return {occupied_.begin(), occupied_.end()};
  }

  // Copy of this grid whose occupancy is exactly the set of cells holding at
  // least one of `positions`. Positions outside the RoI are ignored.
  RoiGrid WithOccupancy(std::span<const Point2> positions) const;

  friend bool operator==(const RoiGrid&, const RoiGrid&) = default;

 private:
  Point2 origin_;
  double width_m_ = 0.0;
  double height_m_ = 0.0;
  double cell_w_ = 0.0;
  double cell_h_ = 0.0;
  int cols_ = 0;
  int rows_ = 0;
  std::set<int> occupied_;
};

RoiGrid build_grid(double width_m, double height_m, double cell_w,
                   double cell_h);
RoiGrid mark_occupancy(const RoiGrid& grid,
                       std::span<const Point2> vehicle_positions);

struct CavState {
  int id = 0;
  Point2 position;
  double heading_deg = 0.0;
  double compute_flops = 1e11;
  bool is_infrastructure = false;

  friend bool operator==(const CavState&, const CavState&) = default;
};

enum class ConfidenceSource { kSynthetic, kFile };

struct ConfidenceSpec {
  ConfidenceSource source = ConfidenceSource::kSynthetic;
  std::string path;  // only meaningful for kFile

  friend bool operator==(const ConfidenceSpec&, const ConfidenceSpec&) =
      default;
};

// One world snapshot. Background vehicles carry no sensors; they only make
// cells occupied.
struct Scenario {
  RoiGrid grid;
  std::vector<CavState> cavs;
  std::vector<Point2> background;
  std::uint64_t seed = 0;
  ConfidenceSpec confidence;

  // Throws InvalidArgumentError when no CAV has this id.
  const CavState& cav(int id) const;
  // CAV ids in ascending order.
  std::vector<int> cav_ids() const;
  std::vector<Point2> vehicle_positions() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct GridSpec {
  double width_m = 280.0;
  double height_m = 80.0;
  double cell_w = 10.0;
  double cell_h = 6.0;
  Point2 origin;
};

struct GeneratorOptions {
  double cav_compute_flops = 1e11;
  // When > 0, y coordinates are snapped to lane centres of this width.
  double lane_width_m = 0.0;
};

// Draws CAV and background positions uniformly inside the RoI. Fully
// determined by the arguments. Throws InvalidArgumentError if n_cavs < 1.
Scenario generate_scenario(std::uint64_t seed, int n_cavs,
                           int n_background_vehicles, const GridSpec& grid,
                           const GeneratorOptions& options = {});

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr double kDefaultPositionMargin = 10.0;

// Throws ValidationError describing the first broken invariant.
void validate_scenario(const Scenario& scenario,
                       double position_margin_m = kDefaultPositionMargin);

nlohmann::json scenario_to_json(const Scenario& scenario);
// Throws ParseError on a structurally wrong document and ValidationError
// when the decoded scenario breaks an invariant. Occupancy is recomputed
// from the vehicle positions.
Scenario scenario_from_json(const nlohmann::json& doc);

// Throws IoError, ParseError or ValidationError.
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario,
                   const std::filesystem::path& path);

}  // namespace lgcp

#endif  // LGCP_SCENARIO_H_
