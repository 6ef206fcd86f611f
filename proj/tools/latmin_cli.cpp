// Experiment runner CLI.  Subcommands: sample, experiment, verify, loglaw,
// volume.  A run is one JSON config document; outputs land in --out.
// Exit codes: 0 success, 2 usage/config error, 3 verification failure,
// 4 enumeration budget exceeded.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "latmin/errors.hpp"
#include "latmin/experiment.hpp"

namespace {

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config parse error: " + std::string(e.what()));
  }
}

void write_outputs(const latmin::RunOutput& out, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, bytes] : out.files) {
    std::ofstream f(out_dir + "/" + name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_dir + "/" + name);
    f << bytes;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice extremal-statistics experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  long long seed_override = -1;
  int threads = 1;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed_override, "override the config seed");
  app.add_option("--threads", threads, "worker threads (outputs do not depend on it)");

  auto* cmd_sample = app.add_subcommand("sample", "draw lattices to JSONL");
  auto* cmd_experiment =
      app.add_subcommand("experiment", "minima / hit-count experiment");
  auto* cmd_verify =
      app.add_subcommand("verify", "first/second moment and hitting checks");
  auto* cmd_loglaw = app.add_subcommand("loglaw", "weighted-minima trend table");
  auto* cmd_volume = app.add_subcommand("volume", "closed-form/MC/fit volumes");
  for (auto* sub : {cmd_sample, cmd_experiment, cmd_verify, cmd_loglaw, cmd_volume})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    nlohmann::json config = load_config(config_path);
    if (seed_override >= 0) config["seed"] = (std::uint64_t)seed_override;
    if (config.contains("threads") && threads == 1)
      threads = config.at("threads").get<int>();
    if (threads < 1) threads = 1;

    latmin::RunOutput out;
    if (cmd_sample->parsed()) {
      out = latmin::run_sample(config);
    } else if (cmd_experiment->parsed()) {
      out = latmin::run_experiment(config, threads);
    } else if (cmd_verify->parsed()) {
      out = latmin::run_verify(config, threads);
    } else if (cmd_loglaw->parsed()) {
      out = latmin::run_loglaw(config, threads);
    } else {
      out = latmin::run_volume(config);
    }
    write_outputs(out, out_dir);

    if (cmd_verify->parsed()) {
      for (const auto& row : out.summary.at("rows")) {
        std::cout << row.at("identity").get<std::string>()
                  << " volume=" << row.at("volume").dump()
                  << " estimate=" << row.at("estimate").dump()
                  << " reference="
                  << (row.contains("reference") ? row.at("reference").dump()
                                                : row.at("interval").dump())
                  << (row.contains("z") ? " z=" + row.at("z").dump() : "")
                  << (row.at("pass").get<bool>() ? " PASS" : " FAIL") << "\n";
      }
      if (!out.verified) return 3;
    } else {
      std::cout << out.summary.dump(2) << "\n";
    }
    return 0;
  } catch (const latmin::resource_limit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
