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
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "lgcp/assignment.h"
#include "lgcp/error.h"
#include "lgcp/io.h"
#include "lgcp/rng.h"

namespace lgcp {
namespace {

std::optional<int> IndexOf(const std::vector<int>& ids, int id) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return std::nullopt;
  return static_cast<int>(it - ids.begin());
}

void RequireSortedUnique(const std::vector<int>& ids, const char* what) {
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i - 1] >= ids[i]) {
      throw ValidationError(std::string(what) +
                            " ids must be strictly ascending");
    }
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

ConfidenceMap::ConfidenceMap(std::vector<int> area_ids,
                             std::vector<int> cav_ids,
                             std::vector<double> values)
    : area_ids_(std::move(area_ids)),
      cav_ids_(std::move(cav_ids)),
      values_(std::move(values)) {
  RequireSortedUnique(area_ids_, "area");
  RequireSortedUnique(cav_ids_, "CAV");
  if (values_.size() != area_ids_.size() * cav_ids_.size()) {
    throw ValidationError("confidence matrix has " +
                          std::to_string(values_.size()) + " values, expected " +
                          std::to_string(area_ids_.size() * cav_ids_.size()));
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("confidence value out of [0,1]: " +
                            format_double(v));
    }
  }
}

double ConfidenceMap::at(int area_id, int cav_id) const {
  auto row = area_row(area_id);
  auto col = cav_col(cav_id);
  if (!row || !col) {
    throw InvalidArgumentError("no confidence for area " +
                               std::to_string(area_id) + ", CAV " +
                               std::to_string(cav_id));
  }
  return value(*row, *col);
}

std::optional<int> ConfidenceMap::area_row(int area_id) const {
  return IndexOf(area_ids_, area_id);
}

std::optional<int> ConfidenceMap::cav_col(int cav_id) const {
  return IndexOf(cav_ids_, cav_id);
}

void validate_params(const SyntheticConfidenceParams& p) {
  if (!(p.base > 0.0 && p.base <= 1.0)) {
    throw InvalidArgumentError("base must lie in (0, 1]");
  }
  if (!(p.decay_length_m > 0.0)) {
    throw InvalidArgumentError("decay_length must be positive");
  }
  if (!(p.occlusion_penalty >= 0.0 && p.occlusion_penalty <= 1.0)) {
    throw InvalidArgumentError("occlusion_penalty must lie in [0, 1]");
  }
  if (!(p.noise_sigma >= 0.0)) {
    throw InvalidArgumentError("noise_sigma must be non-negative");
  }
}

int occluding_cells(const RoiGrid& grid, const Point2& from,
                    int target_cell) {
  const Point2 to = grid.cell_center(target_cell);
  const std::optional<int> own = grid.cell_of(from);
  const Box roi = grid.bounds();
  const double lo_x = std::max(std::min(from.x, to.x), roi.min_x);
  const double hi_x = std::min(std::max(from.x, to.x), roi.max_x);
  const double lo_y = std::max(std::min(from.y, to.y), roi.min_y);
  const double hi_y = std::min(std::max(from.y, to.y), roi.max_y);
  if (lo_x > hi_x || lo_y > hi_y) return 0;
  const auto col_of = [&](double x) {
    return std::clamp(static_cast<int>((x - roi.min_x) / grid.cell_w()), 0,
                      grid.cols() - 1);
  };
  const auto row_of = [&](double y) {
    return std::clamp(static_cast<int>((y - roi.min_y) / grid.cell_h()), 0,
                      grid.rows() - 1);
  };
  int count = 0;
  for (int row = row_of(lo_y); row <= row_of(hi_y); ++row) {
    for (int col = col_of(lo_x); col <= col_of(hi_x); ++col) {
      const int cell = row * grid.cols() + col;
      if (cell == target_cell || (own && cell == *own)) continue;
      if (!grid.is_occupied(cell)) continue;
      if (segment_box_overlap(from, to, grid.cell_bounds(cell)) > 0.0) ++count;
    }
  }
  return count;
}

ConfidenceMap synthetic_confidence(const Scenario& scenario,
                                   const SyntheticConfidenceParams& params,
                                   std::uint64_t seed) {
  validate_params(params);
  const std::vector<int> areas = scenario.grid.occupied_cells();
  const std::vector<int> ids = scenario.cav_ids();
  std::vector<double> values;
  values.reserve(areas.size() * ids.size());
  Rng rng(derive_seed({seed, 0x636f6e66ULL}));
  for (int area : areas) {
    const Point2 center = scenario.grid.cell_center(area);
    for (int id : ids) {
      const Point2& pos = scenario.cav(id).position;
      const double d = distance(pos, center);
      const int k = occluding_cells(scenario.grid, pos, area);
      double v = params.base * std::exp(-d / params.decay_length_m) *
                 std::pow(params.occlusion_penalty, k);
      if (params.noise_sigma > 0.0) v += rng.normal(0.0, params.noise_sigma);
      values.push_back(std::clamp(v, 0.0, 1.0));
    }
  }
  return ConfidenceMap(areas, ids, std::move(values));
}

ConfidenceMap parse_confidence_csv(const std::string& text,
                                   const Scenario& scenario) {
  const std::vector<int> areas = scenario.grid.occupied_cells();
  const std::vector<int> ids = scenario.cav_ids();
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    ++rows;
    std::size_t cols = 0;
    std::string_view rest = line;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view field = Trim(rest.substr(0, comma));
      double v = 0.0;
      auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() ||
          ptr != field.data() + field.size()) {
        throw ParseError("confidence row " + std::to_string(rows) +
                         ": not a number: '" + std::string(field) + "'");
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("confidence row " + std::to_string(rows) +
                              ": value " + std::string(field) +
                              " outside [0,1]");
      }
      values.push_back(v);
      ++cols;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols != ids.size()) {
      throw ValidationError("confidence row " + std::to_string(rows) + " has " +
                            std::to_string(cols) + " columns, expected " +
                            std::to_string(ids.size()));
    }
  }
  if (rows != areas.size()) {
    throw ValidationError("confidence file has " + std::to_string(rows) +
                          " rows, expected " + std::to_string(areas.size()));
  }
  return ConfidenceMap(areas, ids, std::move(values));
}

ConfidenceMap load_confidence(const std::filesystem::path& path,
                              const Scenario& scenario) {
  return parse_confidence_csv(read_text_file(path), scenario);
}

std::string confidence_to_csv(const ConfidenceMap& map) {
  std::string out;
  for (int r = 0; r < map.n_areas(); ++r) {
    for (int c = 0; c < map.n_cavs(); ++c) {
      if (c > 0) out += ',';
      out += format_double(map.value(r, c));
    }
    out += '\n';
  }
  return out;
}

double group_confidence(const ConfidenceMap& map, int area_id,
                        std::span<const int> members) {
  if (members.empty()) {
    throw InvalidArgumentError("group confidence of an empty member set");
  }
  double miss = 1.0;
  for (int id : members) miss *= 1.0 - map.at(area_id, id);
  return 1.0 - miss;
}

double global_confidence(const ConfidenceMap& map,
                         const Assignment& assignment) {
  if (map.n_areas() == 0) return 0.0;
  double sum = 0.0;
  for (const auto& [area, group] : assignment.groups) {
    sum += group_confidence(map, area, group.members);
  }
  return sum / map.n_areas();
}

}  // namespace lgcp
