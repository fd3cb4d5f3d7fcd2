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

#include "lgcp/experiment.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "lgcp/error.h"
#include "lgcp/io.h"

namespace lgcp {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lgcp_exp_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Cli(const std::string& args) {
    const std::string cmd = std::string(LGCP_CLI_PATH) + " " + args + " >" +
                            (dir_ / "stdout.txt").string() + " 2>" +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

TEST(ConfigTest, PresetsAndValidation) {
  EXPECT_NO_THROW(validate_config(preset_config("default")));
  const ExperimentConfig c = preset_config("opv2v-like");
  EXPECT_EQ(c.delta_g, std::vector<double>{0.075});
  EXPECT_DOUBLE_EQ(c.grid.width_m, 280);
  EXPECT_DOUBLE_EQ(c.full_feature_bits, 2.16e6);
  EXPECT_THROW(preset_config("nope"), ValidationError);

  ExperimentConfig bad = c;
  bad.n_cavs = {0};
  EXPECT_THROW(validate_config(bad), ValidationError);
  bad = c;
  bad.delta_g.clear();
  EXPECT_THROW(validate_config(bad), ValidationError);
  bad = c;
  bad.seeds.clear();
  EXPECT_THROW(validate_config(bad), ValidationError);
  bad = c;
  bad.format = "xml";
  EXPECT_THROW(validate_config(bad), ValidationError);
  bad = c;
  bad.fusion_model = "mystery";
  EXPECT_THROW(validate_config(bad), ValidationError);
  bad = c;
  bad.channel.n_subchannels = 9;
  EXPECT_THROW(validate_config(bad), ValidationError);
}

TEST(ConfigTest, JsonLayering) {
  const nlohmann::json doc = nlohmann::json::parse(R"({
    "delta_g": [0.05, 0.1], "n_cavs": 4, "paradigms": ["lgcp", "edge"],
    "channel": {"n_subchannels": 3}, "fusion_model": "cobevt",
    "slot_policy": "fixed", "verify": {"instances": 10}
  })");
  const ExperimentConfig c = apply_config_json(preset_config("default"), doc);
  EXPECT_EQ(c.delta_g, (std::vector<double>{0.05, 0.1}));
  EXPECT_EQ(c.n_cavs, std::vector<int>{4});
  EXPECT_EQ(c.paradigms.size(), 2u);
  EXPECT_EQ(c.channel.n_subchannels, 3);
  EXPECT_DOUBLE_EQ(c.channel.subchannel_bw_mhz, 8.0);
  EXPECT_DOUBLE_EQ(fusion_model_of(c).flops_full_fusion, 2228e6);
  EXPECT_EQ(c.slot_policy, SlotPolicy::kFixed);
  EXPECT_EQ(c.verify_instances, 10);
  // Round trip through the serialized form.
  EXPECT_EQ(config_to_json(apply_config_json(ExperimentConfig{}, config_to_json(c))),
            config_to_json(c));
}

TEST(ConfigTest, UnknownOrMalformedKeys) {
  EXPECT_THROW(apply_config_json({}, {{"deltag", 0.1}}), ValidationError);
  EXPECT_THROW(apply_config_json({}, {{"channel", {{"radius", 1}}}}), ValidationError);
  EXPECT_THROW(apply_config_json({}, {{"n_cavs", "many"}}), ParseError);
  EXPECT_THROW(apply_config_json({}, {{"paradigms", {"cloud"}}}), ValidationError);
}

TEST_F(TempDir, GenerateWritesOneFilePerPoint) {
  ExperimentConfig c;
  c.seeds = {1, 2};
  c.n_cavs = {5};
  c.out = dir_.string();
  std::vector<fs::path> written;
  EXPECT_EQ(cmd_generate(c, &written), 0);
  ASSERT_EQ(written.size(), 2u);
  const std::string first = read_text_file(written[0]);
  EXPECT_EQ(cmd_generate(c, nullptr), 0);
  EXPECT_EQ(read_text_file(written[0]), first);
  EXPECT_EQ(load_scenario(written[1]).cavs.size(), 5u);
  c.n_cavs = {0};
  EXPECT_THROW(cmd_generate(c, nullptr), ValidationError);
}

TEST(SweepTest, DeltaSweepConfidenceNonIncreasing) {
  ExperimentConfig c = preset_config("opv2v-like");
  c.delta_g = {0.05, 0.075, 0.1, 0.125};
  c.n_cavs = {5};
  c.seeds = {1, 2, 3, 4, 5};
  c.paradigms = {Paradigm::kLgcp};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.rows.size(), 20u);
  EXPECT_EQ(r.failures(), 0);
  for (std::size_t i = 0; i < r.rows.size(); i += 4) {
    for (std::size_t k = 1; k < 4; ++k) {
      EXPECT_LE(*r.rows[i + k].report->global_confidence,
                *r.rows[i + k - 1].report->global_confidence);
    }
  }
}

TEST(SweepTest, VehicleColumnIsQuadratic) {
  ExperimentConfig c = preset_config("opv2v-like");
  c.seeds = {7};
  c.paradigms = {Paradigm::kVehicle};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.rows.size(), 6u);
  for (const SweepRow& row : r.rows) {
    EXPECT_DOUBLE_EQ(row.report->volume_bits,
                     row.n_cavs * (row.n_cavs - 1) * 2.16e6);
  }
}

TEST(SweepTest, OutputIndependentOfThreadCount) {
  ExperimentConfig c = preset_config("opv2v-like");
  c.seeds = {1, 2, 3, 4};
  c.detail = true;
  c.threads = 1;
  const std::string serial = sweep_to_csv(run_sweep(c));
  const std::string serial_json = sweep_to_json(run_sweep(c)).dump();
  c.threads = 4;
  EXPECT_EQ(sweep_to_csv(run_sweep(c)), serial);
  EXPECT_EQ(sweep_to_json(run_sweep(c)).dump(), serial_json);
}

TEST(SweepTest, CsvShape) {
  ExperimentConfig c = preset_config("opv2v-like");
  c.n_cavs = {3};
  const std::string csv = sweep_to_csv(run_sweep(c));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  const auto columns = std::count(line.begin(), line.end(), ',');
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(SweepTest, EmptyListsRejected) {
  ExperimentConfig c;
  c.delta_g.clear();
  EXPECT_THROW(run_sweep(c), ValidationError);
}

TEST(VerifyTest, SmallCorpusPasses) {
  ExperimentConfig c;
  c.verify_instances = 40;
  const VerifyReport r = run_verify(c);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.makespan_instances, 40);
  int hist_total = 0;
  for (const auto& [gap, n] : r.makespan_gap_histogram) {
    EXPECT_GE(gap, 0);
    hist_total += n;
  }
  EXPECT_EQ(hist_total, 40);
  EXPECT_EQ(r.to_json(), run_verify(c).to_json());
}

TEST(VerifyTest, GuardRefusalNamesOffenders) {
  ExperimentConfig c;
  c.verify_max_cavs = 9;
  c.verify_max_packets = 12;
  try {
    run_verify(c);
    FAIL() << "expected refusal";
  } catch (const RefusalError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("max_cavs=9"), std::string::npos);
    EXPECT_NE(what.find("max_packets=12"), std::string::npos);
  }
}

TEST(CompareTest, NeedsThirtySeeds) {
  ExperimentConfig c;
  c.seeds = {1, 2, 3};
  EXPECT_THROW(run_compare_sched(c), ValidationError);
}

TEST(CompareTest, DeterministicAndConsistent) {
  ExperimentConfig c;
  c.seeds.clear();
  for (std::uint64_t s = 1; s <= 30; ++s) c.seeds.push_back(s);
  const CompareReport a = run_compare_sched(c);
  EXPECT_EQ(a.to_json(), run_compare_sched(c).to_json());
  EXPECT_EQ(a.rows.size(), 30u);
  for (const CompareRow& r : a.rows) {
    EXPECT_GT(r.packets, 0);
    EXPECT_GT(r.random_total_s, r.random_joint_s);
  }
}

TEST(MedianTest, OddEvenEmpty) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(median({}), 0);
}

TEST_F(TempDir, CliExitCodes) {
  const std::string out = (dir_ / "s.csv").string();
  EXPECT_EQ(Cli("run --preset opv2v-like --seeds 1..2 --n-cavs 2,3 --out " + out), 0);
  const std::string first = read_text_file(out);
  EXPECT_EQ(Cli("run --preset opv2v-like --seeds 1..2 --n-cavs 2,3 --out " + out), 0);
  EXPECT_EQ(read_text_file(out), first);

  EXPECT_EQ(Cli("run --n-cavs 0 --out " + out), 1);
  EXPECT_EQ(Cli("run --delta-g 1.5 --out " + out), 1);
  EXPECT_EQ(Cli("run --format xml --out " + out), 1);
  EXPECT_EQ(Cli("bogus"), 1);
  EXPECT_EQ(Cli("compare-sched --seeds 1..5 --out " + out), 1);
  EXPECT_EQ(Cli("verify --config " + (dir_ / "missing.json").string()), 1);

  // A scenario whose confidence file is missing yields failed rows.
  nlohmann::json doc = scenario_to_json(generate_scenario(1, 3, 2, GridSpec{}));
  doc["confidence"] = {{"source", "file"}, {"path", "absent.csv"}};
  write_text_file(dir_ / "sc.json", doc.dump());
  EXPECT_EQ(Cli("run --scenario " + (dir_ / "sc.json").string() + " --out " + out), 2);
  EXPECT_NE(read_text_file(out).find("absent.csv"), std::string::npos);
}

TEST_F(TempDir, CliScenarioWithConfidenceFile) {
  const Scenario s = generate_scenario(4, 3, 5, GridSpec{});
  write_text_file(dir_ / "conf.csv",
                  confidence_to_csv(synthetic_confidence(s, {}, 1)));
  nlohmann::json doc = scenario_to_json(s);
  doc["confidence"] = {{"source", "file"}, {"path", "conf.csv"}};
  write_text_file(dir_ / "sc.json", doc.dump());
  const std::string out = (dir_ / "r.json").string();
  EXPECT_EQ(Cli("run --scenario " + (dir_ / "sc.json").string() +
                " --format json --out " + out),
            0);
  const nlohmann::json rows = nlohmann::json::parse(read_text_file(out))["rows"];
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0]["n_cavs"], 3);
}

TEST_F(TempDir, CliGenerateVerifyCompare) {
  EXPECT_EQ(Cli("generate --seeds 1,2 --n-cavs 5 --out " + dir_.string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "scenario_s1_n5.json"));
  EXPECT_TRUE(fs::exists(dir_ / "scenario_s2_n5.json"));
  EXPECT_EQ(Cli("verify --instances 20 --out " + (dir_ / "v.json").string()), 0);
  EXPECT_EQ(Cli("compare-sched --seeds 1..30 --out " + (dir_ / "c.json").string()), 0);
  const std::string first = read_text_file(dir_ / "c.json");
  EXPECT_EQ(Cli("compare-sched --seeds 1..30 --out " + (dir_ / "c.json").string()), 0);
  EXPECT_EQ(read_text_file(dir_ / "c.json"), first);
}

}  // namespace
}  // namespace lgcp
