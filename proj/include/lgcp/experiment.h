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

#ifndef LGCP_EXPERIMENT_H_
#define LGCP_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lgcp/confidence.h"
#include "lgcp/paradigms.h"
#include "lgcp/scenario.h"

namespace lgcp {

// Everything a command needs. Built from a preset, then a JSON config file,
// then command-line overrides.
struct ExperimentConfig {
  // Scenario source: a file, or the generator below (one scenario per seed
  // and CAV count).
  std::optional<std::string> scenario_path;
  GridSpec grid;
  int n_background = 10;
  GeneratorOptions generator;
  SyntheticConfidenceParams confidence;

  ChannelParams channel;
  std::string fusion_model = "where2comm";  // preset name or "custom"
  double custom_fusion_flops = 0.0;
  ControlMessageSizes messages;
  double full_feature_bits = 2.16e6;
  std::optional<double> feature_bits;
  SlotPolicy slot_policy = SlotPolicy::kPacketDuration;
  double fixed_slot_ms = 0.25;
  PriorityMode priority_mode = PriorityMode::kStatic;
  double edge_compute_flops = 2e12;
  VehicleMode vehicle_mode = VehicleMode::kUnicast;

  std::vector<double> delta_g = {0.075};
  std::vector<int> n_cavs = {5};
  std::vector<Paradigm> paradigms = {Paradigm::kLgcp, Paradigm::kVehicle,
                                     Paradigm::kEdge};
  double t_max_ms = 100.0;
  std::vector<std::uint64_t> seeds = {1};

  std::string out = "out";
  std::string format = "csv";  // csv | json
  bool detail = false;         // JSON rows carry assignment and schedule
  int threads = 0;             // 0 = hardware concurrency

  // Oracle harness.
  int verify_instances = 200;
  int verify_max_cavs = 6;
  int verify_max_areas = 6;
  int verify_max_packets = 8;
  int verify_max_subchannels = 3;

  // Scheduler comparison corpus.
  int compare_n_cavs = 30;
  int compare_n_background = 30;
};

// Known presets: "default" and "opv2v-like". Throws ValidationError.
ExperimentConfig preset_config(const std::string& name);
// Overlays the fields present in `doc` onto `base`. Throws ParseError or
// ValidationError (unknown keys are rejected).
ExperimentConfig apply_config_json(ExperimentConfig base,
                                   const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
// Throws ValidationError describing the first problem.
void validate_config(const ExperimentConfig& config);

FusionCostModel fusion_model_of(const ExperimentConfig& config);
LgcpConfig lgcp_config_of(const ExperimentConfig& config, double delta_g,
                          std::uint64_t link_seed);
BaselineConfig baseline_config_of(const ExperimentConfig& config,
                                  std::uint64_t link_seed);

// Per-(seed, CAV count) world and derived seeds.
struct SweepInstance {
  std::uint64_t seed = 0;
  int n_cavs = 0;
  Scenario scenario;
  ConfidenceMap confidence;
  std::uint64_t link_seed = 0;
};
SweepInstance make_instance(const ExperimentConfig& config, std::uint64_t seed,
                            int n_cavs);

struct SweepRow {
  std::uint64_t seed = 0;
  int n_cavs = 0;
  double delta_g = 0.0;
  Paradigm paradigm = Paradigm::kLgcp;
  std::optional<ParadigmReport> report;
  int n_groups = 0;
  int dropped_members = 0;
  std::string error;
  nlohmann::json detail;  // assignment + schedule when requested
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int failures() const;
};

// One row per seed x CAV count x delta_g x paradigm, in that nesting order.
SweepResult run_sweep(const ExperimentConfig& config);
std::string sweep_to_csv(const SweepResult& result);
nlohmann::json sweep_to_json(const SweepResult& result);

struct PropertyCheck {
  std::string name;
  int passed = 0;
  int total = 0;
  std::vector<std::string> failures;  // first few offending instances

  bool ok() const { return passed == total; }
};

struct VerifyReport {
  std::vector<PropertyCheck> checks;
  std::map<int, int> makespan_gap_histogram;  // gap in slots -> count
  int makespan_optimal = 0;
  int makespan_instances = 0;
  double leader_gap_mean = 0.0;  // greedy / optimal max load
  double leader_gap_max = 0.0;
  int leader_over_2x = 0;
  int leader_instances = 0;

  bool ok() const;
  nlohmann::json to_json() const;
};

// Greedy-vs-oracle comparisons over seeded guard-sized corpora plus a
// conflict replay of full-size schedules. Throws RefusalError when the
// configured sizes exceed the oracle guards.
VerifyReport run_verify(const ExperimentConfig& config);

struct CompareRow {
  std::uint64_t seed = 0;
  int packets = 0;
  double priority_joint_s = 0.0;
  double random_joint_s = 0.0;
  double priority_total_s = 0.0;
  double random_total_s = 0.0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  double priority_median_s = 0.0;
  double random_median_s = 0.0;
  double priority_mean_s = 0.0;
  double random_mean_s = 0.0;
  double median_reduction = 0.0;  // (random - priority) / random

  nlohmann::json to_json() const;
};

// Priority versus random-order scheduling on identical dense instances.
// Throws ValidationError with fewer than 30 seeds.
CompareReport run_compare_sched(const ExperimentConfig& config);

// File-writing command wrappers. Each returns the process exit code:
// 0 success, 1 validation error, 2 per-row failures.
int cmd_generate(const ExperimentConfig& config,
                 std::vector<std::filesystem::path>* written = nullptr);
int cmd_run(const ExperimentConfig& config);
int cmd_verify(const ExperimentConfig& config);
int cmd_compare_sched(const ExperimentConfig& config);

// Command-line entry point: `lgcp <generate|run|verify|compare-sched> ...`.
int run_cli(int argc, char** argv);

double median(std::vector<double> values);

// Seeded corpora used by the oracle harness.
ConfidenceMap random_oracle_map(std::uint64_t seed, int max_cavs,
                                int max_areas);
double random_delta_g(std::uint64_t seed);

struct ScheduleInstance {
  std::vector<Packet> packets;
  ChannelParams channel;
  std::map<int, Point2> positions;
};
ScheduleInstance random_schedule_instance(std::uint64_t seed, int max_packets,
                                          int max_subchannels);

// Recomputes the joint latency of `schedule` from its placed packets alone:
// per-area completion from the last packet slot, then FIFO fusion per leader.
double replay_joint_latency(const Schedule& schedule,
                            std::span<const AreaTask> tasks,
                            const ScheduleInputs& inputs);

}  // namespace lgcp

#endif  // LGCP_EXPERIMENT_H_
