#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tteda/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tensor-train estimation-of-distribution optimizer"};
  app.require_subcommand(1);

  tteda::CommandOptions opts;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::string out;
  unsigned threads = 1;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Base seed override");
    cmd->add_option("--budget", budget, "Evaluation budget override");
    cmd->add_option("--out", out, "Output directory");
    cmd->add_option("--threads", threads, "Worker threads across runs (0 = auto)");
  };

  std::string spec_path;
  auto* run = app.add_subcommand("run", "Run a multi-seed campaign from a JSON spec");
  run->add_option("spec", spec_path, "Spec file")->required();
  add_common(run);

  auto* toy = app.add_subcommand("toy", "Four-bit demo of the elite update");
  add_common(toy);

  std::vector<double> lambdas{0.0, 1.0};
  auto* sweep = app.add_subcommand("lambda-sweep", "Run one spec at several lambda values");
  sweep->add_option("spec", spec_path, "Spec file")->required();
  sweep->add_option("--lambdas", lambdas, "Comma-separated lambda values")->delimiter(',');
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tteda::kExitConfig;
  }

  opts.seed = seed;
  opts.budget = budget;
  if (!out.empty()) opts.out = out;
  opts.threads = threads;

  if (*run) return tteda::cmd_run(spec_path, opts, std::cout, std::cerr);
  if (*toy) return tteda::cmd_toy(opts, std::cout, std::cerr);
  return tteda::cmd_lambda_sweep(spec_path, lambdas, opts, std::cout, std::cerr);
}
