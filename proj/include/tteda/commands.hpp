#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tteda/engine.hpp"
#include "tteda/run_spec.hpp"

namespace tteda {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<std::filesystem::path> out;
  unsigned threads = 1;
};

/// Output directory: --out, then the spec file's output.dir, then $TTEDA_OUT,
/// then ./tteda_output.
std::filesystem::path resolve_output_dir(const RunSpec& spec, const CommandOptions& opts);

/// Applies --seed / --budget overrides and revalidates.
void apply_overrides(RunSpec& spec, const CommandOptions& opts);

/// `%.17g`.
std::string format_real(double value);

// Output writers. Each file starts with a header row.
void write_convergence_csv(const std::filesystem::path& file, std::span<const RunResult> runs);
void write_summary_csv(const std::filesystem::path& file, const AggregateCurve& curve);
void write_best_pulse_json(const std::filesystem::path& file, const RunSpec& spec,
                           const RunResult& best);
void write_trajectory_csv(const std::filesystem::path& file, const Problem& problem,
                          const Config& best);

/// Index of the run with the lowest best objective (first on ties).
std::size_t best_run_index(std::span<const RunResult> runs);

/// Checkpoints go to <dir>/checkpoints/run_<r>_iter_<i>.json (TensorTrain JSON).
std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::size_t run,
                                      std::size_t iteration);

// Commands return an ExitCode and report errors on `err`.
int cmd_run(const std::filesystem::path& spec_path, const CommandOptions& opts, std::ostream& out,
            std::ostream& err);

/// Four-bit demo: uniform chi=2 model, elites {0000, 0001, 0010, 0011}, ten
/// sweeps at eta = 0.1. Prints one CSV row per configuration with the
/// enumerated and empirical (10^4 samples) probabilities before and after.
int cmd_toy(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Same problem and seeds at each lambda. summary.csv gains a leading lambda
/// column; convergence.csv likewise.
int cmd_lambda_sweep(const std::filesystem::path& spec_path, const std::vector<double>& lambdas,
                     const CommandOptions& opts, std::ostream& out, std::ostream& err);

struct ToyResult {
  std::vector<Config> configs;  // all 16, lexicographic
  std::vector<double> pre_enumerated, pre_empirical;
  std::vector<double> post_enumerated, post_empirical;
  TensorTrain model;
};

ToyResult run_toy(std::uint64_t seed, std::size_t samples = 10000, std::size_t chi = 2,
                  double eta = 0.1, std::size_t sweeps = 10);

} // namespace tteda
