#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "registry.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tfio: Fourier series operators on the torus"};
  app.require_subcommand(0, 1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  bool quiet = false;

  auto add_run_flags = [&](CLI::App* a) {
    a->add_option("--config,-c", config, "YAML experiment file")->check(CLI::ExistingFile);
    a->add_option("--seed", seed, "override the master seed");
    a->add_option("--threads", threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
    a->add_option("--out", out, "output root directory");
    a->add_flag("--quiet,-q", quiet, "no summary on stdout");
  };
  add_run_flags(&app);

  auto* run_cmd = app.add_subcommand("run", "run an experiment file");
  add_run_flags(run_cmd);

  std::string filter;
  auto* list_cmd = app.add_subcommand("list", "list registered phases and symbols");
  list_cmd->add_option("filter", filter, "substring of a name or tag");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tfio::kExitConfig;
  }

  if (*list_cmd) {
    std::cout << tfio::Registry::builtin().listing(filter);
    return tfio::kExitOk;
  }
  if (config.empty()) {
    std::cerr << "tfio: --config is required\n" << app.help();
    return tfio::kExitConfig;
  }

  tfio::RunOverrides o;
  o.seed = seed;
  o.threads = threads;
  o.out = out;
  o.quiet = quiet;
  try {
    return tfio::run_file(config, o, std::cout, std::cerr).exit_code;
  } catch (const std::exception& e) {
    std::cerr << tfio::error_record(torusfio::ErrorKind::Numeric, -1, e.what()).to_json() << '\n';
    return tfio::kExitInternal;
  }
}
