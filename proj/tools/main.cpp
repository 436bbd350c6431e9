// Copyright 2026 dqtraj contributors
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

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "dqtraj/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Config file (key = value lines)");
  cmd->add_option("--out", args.out_path, "Output file (default: stdout)");
  cmd->add_option("--format", args.format, "Output format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--seed", args.seed, "Master seed (overrides disorder.seed)")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--threads", args.threads,
                  "Worker threads (affects speed only, never results)");
}

dqt::Config load_config(const CommonArgs& args) {
  dqt::Config cfg = args.config_path.empty()
                        ? dqt::Config{}
                        : dqt::Config::parse_file(args.config_path);
  if (args.seed_set) cfg.set("disorder.seed", std::to_string(args.seed));
  if (!args.format.empty()) cfg.set("output.format", args.format);
  if (args.threads > 0) cfg.set("threads", std::to_string(args.threads));
  if (!args.out_path.empty()) cfg.set("output.path", args.out_path);
  return cfg;
}

int run(const CommonArgs& args, int (*fn)(const dqt::Config&, std::ostream&, std::ostream&)) {
  const dqt::Config cfg = load_config(args);
  std::ofstream file;
  if (!args.out_path.empty()) {
    file.open(args.out_path);
    if (!file) {
      std::cerr << "error: cannot open output file: " << args.out_path << "\n";
      return dqt::kExitUsage;
    }
  }
  std::ostream& out = args.out_path.empty() ? std::cout : file;
  return fn(cfg, out, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dqtraj: disordered quantum trajectory simulation and analysis"};
  app.require_subcommand(1);

  CommonArgs validate_args, purify_args, enumerate_args, dark_args, example_args;
  int example_id = 0;

  add_common(app.add_subcommand("validate", "Check ensemble completeness at sampled points"),
             validate_args);
  add_common(app.add_subcommand("purify", "Sample trajectories and report purification diagnostics"),
             purify_args);
  add_common(app.add_subcommand("enumerate", "Exact outcome-tree distribution at fixed depth"),
             enumerate_args);
  add_common(app.add_subcommand("dark", "Search for gray projections by defect minimization"),
             dark_args);
  auto* example_cmd =
      app.add_subcommand("example", "Canned reproduction runs with pass/fail summary");
  example_cmd->add_option("id", example_id, "Example id (1, 2, or 3)")->required();
  add_common(example_cmd, example_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("validate")) return run(validate_args, dqt::cmd_validate);
    if (app.got_subcommand("purify")) return run(purify_args, dqt::cmd_purify);
    if (app.got_subcommand("enumerate")) return run(enumerate_args, dqt::cmd_enumerate);
    if (app.got_subcommand("dark")) return run(dark_args, dqt::cmd_dark);
    if (app.got_subcommand("example")) {
      const dqt::Config cfg = load_config(example_args);
      std::ofstream file;
      if (!example_args.out_path.empty()) {
        file.open(example_args.out_path);
        if (!file) {
          std::cerr << "error: cannot open output file: " << example_args.out_path << "\n";
          return dqt::kExitUsage;
        }
      }
      std::ostream& out = example_args.out_path.empty() ? std::cout : file;
      return dqt::cmd_example(example_id, cfg, out, std::cout);
    }
  } catch (const dqt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dqt::kExitUsage;
  } catch (const dqt::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return dqt::kExitFail;
  } catch (const dqt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dqt::kExitFail;
  }
  return dqt::kExitUsage;
}
