#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nlphase/config.hpp"
#include "nlphase/errors.hpp"
#include "nlphase/experiments.hpp"

namespace {

void print_list(bool tsv) {
  for (const auto& e : nlphase::experiment_catalog()) {
    if (tsv) {
      std::cout << e.name << '\t' << e.verifies << '\t';
      bool first = true;
      for (const auto& k : e.keys) {
        std::cout << (first ? "" : ",") << k.key << (k.required ? "" : "=" + k.default_value);
        first = false;
      }
      std::cout << '\n';
      continue;
    }
    std::cout << e.name << "\n  verifies: " << e.verifies << "\n";
    for (const auto& k : e.keys) {
      std::cout << "    " << k.key;
      if (k.required)
        std::cout << " (required)";
      else
        std::cout << " = " << k.default_value;
      std::cout << "  # " << k.help << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal phase-transition energy experiments"};
  app.require_subcommand(1);

  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string config_path;
  bool tsv = false;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--output-dir", output_dir, "directory for CSV and manifest");
  run->add_option("--seed", seed, "override run.seed");
  run->add_option("--threads", threads, "worker threads (0 = one per hardware thread)")->check(CLI::NonNegativeNumber);

  auto* list = app.add_subcommand("list", "list experiments and their keys");
  list->add_flag("--tsv", tsv, "one tab-separated line per experiment");

  auto* validate = app.add_subcommand("validate", "check a config file without running it");
  validate->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nlphase::kExitValidation;
  }

  try {
    if (*list) {
      print_list(tsv);
      return nlphase::kExitOk;
    }
    const nlphase::Config cfg = nlphase::Config::load(config_path);
    if (*validate) {
      const nlphase::Config resolved = nlphase::resolve_config(cfg);
      std::cout << config_path << ": ok (" << resolved.get_string("experiment.type") << ")\n";
      return nlphase::kExitOk;
    }
    nlphase::RunOptions opts;
    opts.output_dir = output_dir;
    opts.seed = seed;
    opts.threads = threads;
    const nlphase::RunResult res = nlphase::run_experiment(cfg, opts);
    for (const auto& [k, v] : res.summary) std::cout << k << " = " << v << "\n";
    for (const auto& f : res.files) std::cout << "wrote " << f.string() << "\n";
    if (res.exit_code == nlphase::kExitDivergence) std::cerr << "warning: divergent energies in the output\n";
    if (res.exit_code == nlphase::kExitCertification) std::cerr << "warning: a checked inequality or certificate failed\n";
    return res.exit_code;
  } catch (const nlphase::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nlphase::kExitValidation;
  } catch (const nlphase::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nlphase::kExitValidation;
  } catch (const nlphase::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nlphase::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
