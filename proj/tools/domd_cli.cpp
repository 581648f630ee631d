#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "domd/config.hpp"
#include "domd/error.hpp"
#include "domd/execute.hpp"
#include "domd/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Distributed online mirror descent simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment and write <out>/<run_name>.csv");
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algo;
  std::optional<std::string> dataset;
  run->add_option("--config", config_path, "experiment config (key = value lines)")->required();
  run->add_option("--out", out_dir, "output directory, overrides out_dir");
  run->add_option("--seed", seed, "master seed, overrides seed");
  run->add_option("--algo", algo, "madgc|single|central, overrides algorithm");
  run->add_option("--dataset", dataset, "LIBSVM file, overrides dataset");

  CLI11_PARSE(app, argc, argv);

  try {
    domd::ExperimentConfig config = domd::parse_config(config_path);
    if (out_dir) config.out_dir = *out_dir;
    if (seed) config.seed = *seed;
    if (algo) config.algorithm = domd::parse_algorithm(*algo);
    if (dataset) config.dataset = *dataset;
    const std::string path = domd::execute(config, domd::threads_from_env());
    std::printf("%s\n", path.c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "domd: %s\n", e.what());
    return 1;
  }
  return 0;
}
