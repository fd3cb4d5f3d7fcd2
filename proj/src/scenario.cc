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

#include "lgcp/scenario.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lgcp/error.h"
#include "lgcp/io.h"
#include "lgcp/rng.h"

namespace lgcp {
namespace {

using nlohmann::json;

// Cells per axis. The small slack keeps 0.3 / 0.1 from producing a sliver.
int CellsAlong(double extent, double cell) {
  return static_cast<int>(std::ceil(extent / cell - 1e-9));
}

bool Finite(const Point2& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

int AxisIndex(double offset, double cell, double extent, int count) {
  int i = static_cast<int>(std::floor(offset / cell));
  i = std::clamp(i, 0, count - 1);
  // Undo rounding in the division so the index agrees with cell_bounds().
  if (i > 0 && offset < i * cell) --i;
  if (i + 1 < count && offset >= std::min((i + 1) * cell, extent)) ++i;
  return i;
}

}  // namespace

RoiGrid RoiGrid::Build(double width_m, double height_m, double cell_w,
                       double cell_h, Point2 origin) {
  for (double v : {width_m, height_m, cell_w, cell_h}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgumentError("grid dimensions must be positive and finite");
    }
  }
  if (!Finite(origin)) throw InvalidArgumentError("grid origin not finite");
  RoiGrid g;
  g.origin_ = origin;
  g.width_m_ = width_m;
  g.height_m_ = height_m;
  g.cell_w_ = cell_w;
  g.cell_h_ = cell_h;
  g.cols_ = std::max(1, CellsAlong(width_m, cell_w));
  g.rows_ = std::max(1, CellsAlong(height_m, cell_h));
  return g;
}

Box RoiGrid::bounds() const {
  return {origin_.x, origin_.y, origin_.x + width_m_, origin_.y + height_m_};
}

std::optional<int> RoiGrid::cell_of(const Point2& p) const {
  if (cols_ == 0 || !Finite(p) || !contains(p)) return std::nullopt;
  const int col = AxisIndex(p.x - origin_.x, cell_w_, width_m_, cols_);
  const int row = AxisIndex(p.y - origin_.y, cell_h_, height_m_, rows_);
  return row * cols_ + col;
}

Box RoiGrid::cell_bounds(int cell) const {
  if (cell < 0 || cell >= cell_count()) {
    throw InvalidArgumentError("cell index out of range: " +
                               std::to_string(cell));
  }
  const int col = cell % cols_;
  const int row = cell / cols_;
  return {origin_.x + col * cell_w_, origin_.y + row * cell_h_,
          origin_.x + std::min((col + 1) * cell_w_, width_m_),
          origin_.y + std::min((row + 1) * cell_h_, height_m_)};
}

RoiGrid RoiGrid::WithOccupancy(std::span<const Point2> positions) const {
  RoiGrid g = *this;
  g.occupied_.clear();
  for (const Point2& p : positions) {
    if (auto cell = cell_of(p)) g.occupied_.insert(*cell);
  }
  return g;
}

RoiGrid build_grid(double width_m, double height_m, double cell_w,
                   double cell_h) {
  return RoiGrid::Build(width_m, height_m, cell_w, cell_h);
}

RoiGrid mark_occupancy(const RoiGrid& grid,
                       std::span<const Point2> vehicle_positions) {
  return grid.WithOccupancy(vehicle_positions);
}

const CavState& Scenario::cav(int id) const {
  for (const CavState& c : cavs) {
    if (c.id == id) return c;
  }
  throw InvalidArgumentError("unknown CAV id " + std::to_string(id));
}

std::vector<int> Scenario::cav_ids() const {
  std::vector<int> ids;
  ids.reserve(cavs.size());
  for (const CavState& c : cavs) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<Point2> Scenario::vehicle_positions() const {
  std::vector<Point2> out;
  out.reserve(cavs.size() + background.size());
  for (const CavState& c : cavs) out.push_back(c.position);
  out.insert(out.end(), background.begin(), background.end());
  return out;
}

Scenario generate_scenario(std::uint64_t seed, int n_cavs,
                           int n_background_vehicles, const GridSpec& spec,
                           const GeneratorOptions& options) {
  if (n_cavs < 1) throw InvalidArgumentError("n_cavs must be >= 1");
  if (n_background_vehicles < 0) {
    throw InvalidArgumentError("n_background_vehicles must be >= 0");
  }
  if (!(options.cav_compute_flops > 0.0)) {
    throw InvalidArgumentError("cav compute must be positive");
  }
  Scenario s;
  s.grid = RoiGrid::Build(spec.width_m, spec.height_m, spec.cell_w,
                          spec.cell_h, spec.origin);
  s.seed = seed;
  Rng rng(seed);
  const int lanes =
      options.lane_width_m > 0.0
          ? std::max(1, static_cast<int>(spec.height_m / options.lane_width_m))
          : 0;
  auto draw = [&]() {
    Point2 p;
    p.x = spec.origin.x + rng.uniform() * spec.width_m;
    if (lanes > 0) {
      const auto lane = static_cast<double>(rng.below(lanes));
      p.y = spec.origin.y + (lane + 0.5) * options.lane_width_m;
    } else {
      p.y = spec.origin.y + rng.uniform() * spec.height_m;
    }
    return p;
  };
  for (int i = 0; i < n_cavs; ++i) {
    CavState c;
    c.id = i;
    c.position = draw();
    c.heading_deg = rng.uniform(0.0, 360.0);
    c.compute_flops = options.cav_compute_flops;
    s.cavs.push_back(c);
  }
  for (int i = 0; i < n_background_vehicles; ++i) s.background.push_back(draw());
  const std::vector<Point2> positions = s.vehicle_positions();
  s.grid = s.grid.WithOccupancy(positions);
  return s;
}

void validate_scenario(const Scenario& s, double margin) {
  if (s.grid.cell_count() == 0) throw ValidationError("grid has no cells");
  if (s.cavs.empty()) throw ValidationError("scenario needs at least one CAV");
  std::set<int> ids;
  Box allowed = s.grid.bounds();
  allowed.min_x -= margin;
  allowed.min_y -= margin;
  allowed.max_x += margin;
  allowed.max_y += margin;
  for (const CavState& c : s.cavs) {
    if (!ids.insert(c.id).second) {
      throw ValidationError("duplicate CAV id " + std::to_string(c.id));
    }
    if (!(c.compute_flops > 0.0) || !std::isfinite(c.compute_flops)) {
      throw ValidationError("CAV " + std::to_string(c.id) +
                            " has non-positive compute");
    }
    if (!Finite(c.position) || !std::isfinite(c.heading_deg)) {
      throw ValidationError("CAV " + std::to_string(c.id) +
                            " has a non-finite pose");
    }
    if (!allowed.contains(c.position)) {
      throw ValidationError("CAV " + std::to_string(c.id) +
                            " lies outside the RoI margin");
    }
  }
  for (const Point2& p : s.background) {
    if (!Finite(p)) throw ValidationError("non-finite background position");
  }
  if (s.confidence.source == ConfidenceSource::kFile &&
      s.confidence.path.empty()) {
    throw ValidationError("file confidence source needs a path");
  }
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["version"] = kScenarioSchemaVersion;
  doc["grid"] = {{"origin", {{"x", s.grid.origin().x}, {"y", s.grid.origin().y}}},
                 {"width_m", s.grid.width_m()},
                 {"height_m", s.grid.height_m()},
                 {"cell_w", s.grid.cell_w()},
                 {"cell_h", s.grid.cell_h()}};
  json cavs = json::array();
  for (const CavState& c : s.cavs) {
    cavs.push_back({{"id", c.id},
                    {"x", c.position.x},
                    {"y", c.position.y},
                    {"heading", c.heading_deg},
                    {"compute_flops", c.compute_flops},
                    {"infra", c.is_infrastructure}});
  }
  doc["cavs"] = std::move(cavs);
  json bg = json::array();
  for (const Point2& p : s.background) bg.push_back({{"x", p.x}, {"y", p.y}});
  doc["background"] = std::move(bg);
  doc["seed"] = s.seed;
  json conf;
  if (s.confidence.source == ConfidenceSource::kFile) {
    conf["source"] = "file";
    conf["path"] = s.confidence.path;
  } else {
    conf["source"] = "synthetic";
  }
  doc["confidence"] = std::move(conf);
  return doc;
}

Scenario scenario_from_json(const json& doc) {
  Scenario s;
  try {
    const int version = doc.at("version").get<int>();
    if (version != kScenarioSchemaVersion) {
      throw ValidationError("unsupported scenario version " +
                            std::to_string(version));
    }
    const json& g = doc.at("grid");
    Point2 origin;
    if (g.contains("origin")) {
      origin = {g["origin"].at("x").get<double>(),
                g["origin"].at("y").get<double>()};
    }
    try {
      s.grid = RoiGrid::Build(g.at("width_m").get<double>(),
                              g.at("height_m").get<double>(),
                              g.at("cell_w").get<double>(),
                              g.at("cell_h").get<double>(), origin);
    } catch (const InvalidArgumentError& e) {
      throw ValidationError(e.what());
    }
    for (const json& c : doc.at("cavs")) {
      CavState cav;
      cav.id = c.at("id").get<int>();
      cav.position = {c.at("x").get<double>(), c.at("y").get<double>()};
      cav.heading_deg = c.value("heading", 0.0);
      cav.compute_flops = c.value("compute_flops", 1e11);
      cav.is_infrastructure = c.value("infra", false);
      s.cavs.push_back(cav);
    }
    if (doc.contains("background")) {
      for (const json& b : doc["background"]) {
        s.background.push_back({b.at("x").get<double>(), b.at("y").get<double>()});
      }
    }
    s.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("confidence")) {
      const json& c = doc["confidence"];
      const std::string source = c.value("source", std::string("synthetic"));
      if (source == "file") {
        s.confidence.source = ConfidenceSource::kFile;
        s.confidence.path = c.value("path", std::string());
      } else if (source != "synthetic") {
        throw ValidationError("unknown confidence source '" + source + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
  validate_scenario(s);
  const std::vector<Point2> positions = s.vehicle_positions();
  s.grid = s.grid.WithOccupancy(positions);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

void save_scenario(const Scenario& scenario,
                   const std::filesystem::path& path) {
  write_text_file(path, scenario_to_json(scenario).dump(2) + "\n");
}

}  // namespace lgcp
