#include "tteda/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "tteda/error.hpp"

namespace tteda {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

void validate(const OptimizerConfig& cfg, std::span<const std::size_t> local_dims) {
  if (local_dims.empty()) throw InvalidArgument("problem has no variables");
  if (cfg.batch_size < 1) throw InvalidArgument("batch size K must be at least 1");
  if (cfg.elite_count < 1) throw InvalidArgument("elite count M must be at least 1");
  if (cfg.elite_count > cfg.batch_size) throw InvalidArgument("elite count M exceeds batch size K");
  if (cfg.budget < cfg.batch_size) throw InvalidArgument("budget must be at least one batch (K)");
  if (cfg.chi < 1) throw InvalidArgument("bond dimension must be at least 1");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0))
    throw InvalidArgument("mutation probability must lie in [0, 1]");
  if (!(cfg.update.eta > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (cfg.update.sweeps < 1) throw InvalidArgument("sweep count must be at least 1");
  if (!(cfg.update.lambda >= 0.0 && cfg.update.lambda <= 1.0))
    throw InvalidArgument("lambda must lie in [0, 1]");
  if (cfg.update.clip_norm && !(*cfg.update.clip_norm > 0.0))
    throw InvalidArgument("clip norm must be positive");
  if (!(cfg.floor > 0.0)) throw InvalidArgument("repair floor must be positive");
  if (cfg.initial_model) {
    const auto dims = cfg.initial_model->local_dims();
    if (!std::equal(dims.begin(), dims.end(), local_dims.begin(), local_dims.end()))
      throw InvalidArgument("initial model does not match the problem dimensions");
  }
}

namespace {

std::string describe(const Config& x) {
  std::ostringstream os;
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? " " : "") << x[i];
  return os.str();
}

} // namespace

RunResult optimize(const OptimizerConfig& cfg, std::span<const std::size_t> local_dims,
                   const ObjectiveFn& objective, const IterationCallback& on_iteration) {
  validate(cfg, local_dims);
  const auto started = std::chrono::steady_clock::now();

  Rng rng(cfg.seed);
  RunResult result;
  result.best_objective = std::numeric_limits<double>::infinity();
  TensorTrain tt = cfg.initial_model ? *cfg.initial_model
                                     : TensorTrain::uniform(local_dims, cfg.chi, cfg.fill);
  const MutationPolicy mutation{cfg.epsilon};

  std::size_t evaluations = 0;
  for (std::size_t iteration = 0; evaluations < cfg.budget; ++iteration) {
    const std::size_t k = std::min(cfg.batch_size, cfg.budget - evaluations);

    SampleBatch batch;
    try {
      batch = sample(tt, rng, k);
    } catch (const DegenerateModel&) {
      tt.add_floor(cfg.floor);
      ++result.floor_repairs;
      batch = sample(tt, rng, k);
    }
    batch = mutate(std::move(batch), mutation, rng, tt);

    parallel_for(k, cfg.threads, [&](std::size_t i) {
      double value;
      try {
        value = objective(batch.configs[i]);
      } catch (const std::exception& e) {
        throw EvaluationError(std::string(e.what()) + " [candidate: " + describe(batch.configs[i]) +
                                  "]",
                              batch.configs[i]);
      }
      if (std::isnan(value))
        throw EvaluationError("objective returned NaN [candidate: " +
                                  describe(batch.configs[i]) + "]",
                              batch.configs[i]);
      batch.objective_values[i] = value;
    });
    evaluations += k;

    IterationRecord record;
    record.iteration = iteration;
    record.evaluations = evaluations;
    record.batch_best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      const double v = batch.objective_values[i];
      record.batch_best = std::min(record.batch_best, v);
      if (v < result.best_objective) {
        result.best_objective = v;
        result.best_config = batch.configs[i];
      }
    }
    record.best_so_far = result.best_objective;
    result.history.push_back(record);
    const EliteSet elites = select_elites(batch, std::min(cfg.elite_count, k));
    SweepReport report;
    try {
      tt = sweep_update(tt, elites, cfg.update, &report);
    } catch (const DegenerateModel&) {
      tt.add_floor(cfg.floor);
      ++result.floor_repairs;
      tt = sweep_update(tt, elites, cfg.update, &report);
    }
    result.dropped_elites += report.dropped_elites;
    if (on_iteration) on_iteration(record, tt);

    if (cfg.target && result.best_objective <= *cfg.target) break;
  }

  result.final_model = std::move(tt);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

AggregateCurve aggregate(std::span<const RunResult> runs) {
  AggregateCurve curve;
  for (const auto& run : runs)
    for (const auto& rec : run.history) curve.evaluations.push_back(rec.evaluations);
  std::sort(curve.evaluations.begin(), curve.evaluations.end());
  curve.evaluations.erase(std::unique(curve.evaluations.begin(), curve.evaluations.end()),
                          curve.evaluations.end());

  std::vector<std::size_t> cursor(runs.size(), 0);
  std::vector<double> column;
  for (std::size_t e : curve.evaluations) {
    column.clear();
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& hist = runs[r].history;
      while (cursor[r] + 1 < hist.size() && hist[cursor[r] + 1].evaluations <= e) ++cursor[r];
      // Before a run's first record there is no best yet; runs that stopped
      // early carry their final best forward.
      if (!hist.empty() && hist[cursor[r]].evaluations <= e)
        column.push_back(hist[cursor[r]].best_so_far);
    }
    if (column.empty()) column.push_back(std::numeric_limits<double>::infinity());
    curve.median.push_back(percentile(column, 50.0));
    curve.p16.push_back(percentile(column, 16.0));
    curve.p84.push_back(percentile(column, 84.0));
  }
  return curve;
}

MultiRunResult multi_run(const OptimizerConfig& cfg, std::span<const std::size_t> local_dims,
                         const ObjectiveFn& objective, std::size_t n_runs, unsigned threads,
                         const RunCallbackFactory& callbacks) {
  if (n_runs < 1) throw InvalidArgument("n_runs must be at least 1");
  validate(cfg, local_dims);
  MultiRunResult out;
  out.runs.resize(n_runs);
  parallel_for(n_runs, threads, [&](std::size_t r) {
    OptimizerConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + r;
    run_cfg.threads = 1;
    out.runs[r] =
        optimize(run_cfg, local_dims, objective, callbacks ? callbacks(r) : IterationCallback{});
  });
  out.curve = aggregate(out.runs);
  return out;
}

} // namespace tteda
