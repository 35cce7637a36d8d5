#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tteda/sampler.hpp"
#include "tteda/tensor_train.hpp"
#include "tteda/updater.hpp"

namespace tteda {

using ObjectiveFn = std::function<double(std::span<const int>)>;

/// An objective evaluation failed; carries the offending candidate.
class EvaluationError : public std::runtime_error {
public:
  EvaluationError(const std::string& what, Config candidate)
      : std::runtime_error(what), candidate_(std::move(candidate)) {}
  const Config& candidate() const { return candidate_; }

private:
  Config candidate_;
};

struct OptimizerConfig {
  std::size_t batch_size = 12;  // K
  std::size_t elite_count = 2;  // M
  std::size_t chi = 4;
  double fill = 1.0;
  double epsilon = 0.02;
  UpdateConfig update;
  /// Maximum number of objective evaluations.
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
  /// Stop once the best objective is <= target.
  std::optional<double> target;
  /// Additive floor applied once when sampling hits an all-zero conditional.
  double floor = 1e-12;
  /// Worker threads for batch evaluation; 0 picks the hardware count.
  unsigned threads = 1;
  /// Starting model (e.g. a loaded checkpoint); uniform with `chi`/`fill` if empty.
  std::optional<TensorTrain> initial_model;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t evaluations = 0;
  double batch_best = 0.0;
  double best_so_far = 0.0;
};

struct RunResult {
  Config best_config;
  double best_objective = 0.0;
  TensorTrain final_model;
  std::vector<IterationRecord> history;
  double wall_seconds = 0.0;
  std::size_t floor_repairs = 0;
  std::size_t dropped_elites = 0;
};

/// Called after each iteration's update with the updated model.
using IterationCallback = std::function<void(const IterationRecord&, const TensorTrain&)>;

/// Throws InvalidArgument for inconsistent settings (M > K, budget < K, ...).
void validate(const OptimizerConfig& cfg, std::span<const std::size_t> local_dims);

/// The sample / mutate / evaluate / select / update loop under an evaluation
/// budget. The last batch is truncated so evaluations never exceed the budget.
RunResult optimize(const OptimizerConfig& cfg, std::span<const std::size_t> local_dims,
                   const ObjectiveFn& objective, const IterationCallback& on_iteration = {});

/// Best-so-far percentiles on the union of all runs' evaluation counts.
struct AggregateCurve {
  std::vector<std::size_t> evaluations;
  std::vector<double> median;
  std::vector<double> p16;
  std::vector<double> p84;
};

struct MultiRunResult {
  std::vector<RunResult> runs;
  AggregateCurve curve;
};

/// Linear-interpolation percentile (q in [0, 100]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

AggregateCurve aggregate(std::span<const RunResult> runs);

using RunCallbackFactory = std::function<IterationCallback(std::size_t run)>;

/// Runs seeds cfg.seed + 0 .. n_runs - 1, in parallel across runs when
/// `threads` != 1. Each run evaluates its batches sequentially.
MultiRunResult multi_run(const OptimizerConfig& cfg, std::span<const std::size_t> local_dims,
                         const ObjectiveFn& objective, std::size_t n_runs, unsigned threads = 1,
                         const RunCallbackFactory& callbacks = {});

/// Invokes fn(i) for i in [0, n) on up to `threads` workers (0 = hardware count).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

} // namespace tteda
