#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rglat/experiments.hpp"

namespace fs = std::filesystem;

namespace {

fs::path default_out_base() {
  if (const char* env = std::getenv(rglat::kOutdirEnvVar)) return fs::path(env);
  return fs::path("runs");
}

void print_error_json(const std::string& kind, const std::string& what) {
  nlohmann::json err = {{"error", kind}, {"detail", what}};
  std::cerr << err.dump(2) << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractal-lattice cascade model: simulation and experiment runner"};
  app.require_subcommand(1);

  std::string config_file;
  std::string out_dir;
  std::string preset = "desk";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool overwrite = false;

  auto add_common = [&](CLI::App* cmd, bool with_preset) {
    cmd->add_option("--config", config_file, "key = value configuration file");
    cmd->add_option("--seed", seed, "master seed override");
    cmd->add_option("--threads", threads, "worker thread cap (0 = all cores)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_flag("--overwrite", overwrite, "allow replacing existing output files");
    if (with_preset)
      cmd->add_option("--preset", preset, "desk (reduced) or paper (full scale)")
          ->check(CLI::IsMember({"desk", "paper"}));
  };

  // experiment <name>
  std::string experiment_name;
  CLI::App* cmd_exp = app.add_subcommand("experiment", "run a registered experiment");
  cmd_exp->add_option("name", experiment_name, "registry entry")->required();
  add_common(cmd_exp, true);

  // simulate
  CLI::App* cmd_sim = app.add_subcommand("simulate", "run a trajectory with probes");
  add_common(cmd_sim, false);

  // verify
  CLI::App* cmd_verify =
      app.add_subcommand("verify", "run the exact-identity checks (thm1, thm2)");
  add_common(cmd_verify, false);

  // list
  bool list_json = false;
  std::string module_filter;
  CLI::App* cmd_list = app.add_subcommand("list", "list registered experiments");
  cmd_list->add_flag("--json", list_json, "machine-readable listing");
  cmd_list->add_option("--module", module_filter, "filter by owning module");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_list->parsed()) {
      if (list_json)
        std::cout << rglat::list_experiments_json(module_filter).dump(2) << "\n";
      else
        std::cout << rglat::list_experiments_text(module_filter);
      return 0;
    }

    if (cmd_exp->parsed()) {
      rglat::RunRequest req;
      req.name = experiment_name;
      req.preset = preset;
      if (!config_file.empty()) req.file_config = rglat::parse_kv_file(config_file);
      req.seed_override = seed;
      req.threads_override = threads;
      req.outdir = out_dir.empty()
                       ? default_out_base() / (experiment_name +
                                               (preset == "paper" ? "_paper" : ""))
                       : fs::path(out_dir);
      req.overwrite = overwrite;
      const rglat::RunReport report = rglat::run_experiment(req);
      std::cout << "wrote " << report.files.size() << " files to "
                << report.outdir.string() << "\n";
      if (report.metadata.contains("report"))
        std::cout << report.metadata["report"].dump(2) << "\n";
      return 0;
    }

    if (cmd_sim->parsed()) {
      rglat::KvMap kv;
      if (!config_file.empty()) kv = rglat::parse_kv_file(config_file);
      const fs::path outdir =
          out_dir.empty() ? default_out_base() / "simulate" : fs::path(out_dir);
      const rglat::RunReport report = rglat::run_simulate(kv, seed, outdir, overwrite);
      std::cout << "wrote " << report.files.size() << " files to "
                << report.outdir.string() << "\n";
      std::cout << report.metadata["ledger"].dump(2) << "\n";
      return 0;
    }

    if (cmd_verify->parsed()) {
      bool all_pass = true;
      for (const std::string name : {"thm1_verify", "thm2_verify"}) {
        rglat::RunRequest req;
        req.name = name;
        if (!config_file.empty()) req.file_config = rglat::parse_kv_file(config_file);
        req.seed_override = seed;
        req.threads_override = threads;
        req.outdir = out_dir.empty() ? default_out_base() / name : fs::path(out_dir + "/" + name);
        req.overwrite = true;
        const rglat::RunReport report = rglat::run_experiment(req);
        const auto& rep = report.metadata["report"];
        const bool pass = rep["pass"].get<bool>();
        all_pass = all_pass && pass;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name
                  << " max_deviation=" << rep["max_deviation"].get<double>()
                  << " (tolerance " << rep["tolerance"].get<double>() << ")\n";
      }
      return all_pass ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    print_error_json("invalid_config", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error_json("runtime_error", e.what());
    return 1;
  }
  return 0;
}
