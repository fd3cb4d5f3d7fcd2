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

#include <charconv>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lgcp/error.h"
#include "lgcp/experiment.h"
#include "lgcp/io.h"

namespace lgcp {
namespace {

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    parts.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

template <typename T>
T ParseNumber(const std::string& s, const std::string& flag) {
  T value{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw ValidationError("bad value '" + s + "' for " + flag);
  }
  return value;
}

// Accepts "3", "1,4,9" and inclusive ranges such as "1..50" (mixable).
template <typename T>
std::vector<T> ParseList(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  for (const std::string& part : SplitCommas(text)) {
    const std::size_t dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(ParseNumber<T>(part, flag));
      continue;
    }
    const T lo = ParseNumber<T>(part.substr(0, dots), flag);
    const T hi = ParseNumber<T>(part.substr(dots + 2), flag);
    if (hi < lo) throw ValidationError("empty range '" + part + "' for " + flag);
    for (T v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

struct Flags {
  std::string config;
  std::string preset = "default";
  std::string seeds;
  std::string n_cavs;
  std::string delta_g;
  std::string paradigms;
  std::string out;
  std::string format;
  std::string scenario;
  int threads = -1;
  int instances = -1;
  bool detail = false;
};

void AddCommon(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--preset", f.preset, "default | opv2v-like");
  cmd->add_option("--seeds", f.seeds, "seed list, e.g. 1,2 or 1..50");
  cmd->add_option("--n-cavs", f.n_cavs, "CAV counts, e.g. 2..7");
  cmd->add_option("--out", f.out, "output file or directory");
  cmd->add_option("--threads", f.threads, "worker threads (0 = auto)");
}

ExperimentConfig BuildConfig(const Flags& f, const std::string& default_out) {
  ExperimentConfig c = preset_config(f.preset);
  c.out = default_out;
  if (!f.config.empty()) {
    c = apply_config_json(c, [&] {
      try {
        return nlohmann::json::parse(read_text_file(f.config));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + f.config + ": " + e.what());
      }
    }());
  }
  if (!f.seeds.empty()) c.seeds = ParseList<std::uint64_t>(f.seeds, "--seeds");
  if (!f.n_cavs.empty()) c.n_cavs = ParseList<int>(f.n_cavs, "--n-cavs");
  if (!f.delta_g.empty()) {
    c.delta_g.clear();
    for (const std::string& s : SplitCommas(f.delta_g)) {
      c.delta_g.push_back(ParseNumber<double>(s, "--delta-g"));
    }
  }
  if (!f.paradigms.empty()) {
    c.paradigms.clear();
    for (const std::string& s : SplitCommas(f.paradigms)) {
      auto p = parse_paradigm(s);
      if (!p) throw ValidationError("unknown paradigm '" + s + "'");
      c.paradigms.push_back(*p);
    }
  }
  if (!f.out.empty()) c.out = f.out;
  if (!f.format.empty()) c.format = f.format;
  if (!f.scenario.empty()) c.scenario_path = f.scenario;
  if (f.threads >= 0) c.threads = f.threads;
  if (f.instances >= 0) c.verify_instances = f.instances;
  if (f.detail) c.detail = true;
  return c;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Confidence-driven grouping and scheduling experiments"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* generate = app.add_subcommand("generate", "write seeded scenarios");
  AddCommon(generate, f);

  CLI::App* run = app.add_subcommand("run", "sweep paradigms and write a table");
  AddCommon(run, f);
  run->add_option("--delta-g", f.delta_g, "gain thresholds, comma separated");
  run->add_option("--paradigms", f.paradigms, "lgcp,vehicle,edge");
  run->add_option("--format", f.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--scenario", f.scenario, "scenario file instead of generator");
  run->add_flag("--detail", f.detail, "include assignments and schedules (json)");

  CLI::App* verify = app.add_subcommand("verify", "check greedy against oracles");
  AddCommon(verify, f);
  verify->add_option("--instances", f.instances, "instances per corpus");

  CLI::App* compare =
      app.add_subcommand("compare-sched", "priority vs random packet order");
  AddCommon(compare, f);
  compare->add_option("--delta-g", f.delta_g, "gain threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) {
      std::vector<std::filesystem::path> written;
      const int code = cmd_generate(BuildConfig(f, "scenarios"), &written);
      for (const auto& p : written) std::cout << p.string() << '\n';
      return code;
    }
    if (run->parsed()) {
      const ExperimentConfig c = BuildConfig(f, "");
      ExperimentConfig out = c;
      if (out.out.empty()) out.out = c.format == "json" ? "sweep.json" : "sweep.csv";
      const int code = cmd_run(out);
      if (code != 0) std::cerr << "some rows failed; see the error column\n";
      return code;
    }
    if (verify->parsed()) {
      const ExperimentConfig c = BuildConfig(f, "verify.json");
      const int code = cmd_verify(c);
      std::cout << read_text_file(c.out);
      return code;
    }
    const ExperimentConfig c = BuildConfig(f, "compare.json");
    return cmd_compare_sched(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace lgcp
