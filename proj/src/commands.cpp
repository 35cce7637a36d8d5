#include "tteda/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tteda/error.hpp"
#include "tteda/sampler.hpp"
#include "tteda/updater.hpp"

namespace tteda {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

fs::path resolve_output_dir(const RunSpec& spec, const CommandOptions& opts) {
  if (opts.out) return *opts.out;
  if (spec.output_dir) return *spec.output_dir;
  if (const char* env = std::getenv("TTEDA_OUT"); env && *env) return env;
  return "tteda_output";
}

void apply_overrides(RunSpec& spec, const CommandOptions& opts) {
  if (opts.seed) spec.optimizer.seed = *opts.seed;
  if (opts.budget) spec.optimizer.budget = *opts.budget;
  try {
    validate(spec.optimizer, spec.problem->local_dims());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("command-line override: ") + e.what());
  }
}

namespace {

std::ofstream open_output(const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + file.string());
  return out;
}

void write_json(const fs::path& file, const ordered_json& doc) {
  auto out = open_output(file);
  out << doc.dump(2) << '\n';
}

} // namespace

void write_convergence_csv(const fs::path& file, std::span<const RunResult> runs) {
  auto out = open_output(file);
  out << "run_id,iteration,evaluations,batch_best,best_so_far\n";
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (const auto& rec : runs[r].history)
      out << r << ',' << rec.iteration << ',' << rec.evaluations << ','
          << format_real(rec.batch_best) << ',' << format_real(rec.best_so_far) << '\n';
}

void write_summary_csv(const fs::path& file, const AggregateCurve& curve) {
  auto out = open_output(file);
  out << "evaluations,median,p16,p84\n";
  for (std::size_t i = 0; i < curve.evaluations.size(); ++i)
    out << curve.evaluations[i] << ',' << format_real(curve.median[i]) << ','
        << format_real(curve.p16[i]) << ',' << format_real(curve.p84[i]) << '\n';
}

std::size_t best_run_index(std::span<const RunResult> runs) {
  if (runs.empty()) throw InvalidArgument("no runs");
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].best_objective < runs[best].best_objective) best = r;
  return best;
}

void write_best_pulse_json(const fs::path& file, const RunSpec& spec, const RunResult& best) {
  const Problem& problem = *spec.problem;
  ordered_json doc;
  doc["problem"] = spec.problem_name;
  doc["objective"] = best.best_objective;
  doc["indices"] = best.best_config;
  if (!problem.is_quantum()) {
    doc["coordinates"] = problem.coordinates(best.best_config);
  } else {
    const ControlFields fields = problem.decode(best.best_config);
    doc["duration"] = fields.grid.duration;
    doc["n_steps"] = fields.grid.n_steps;
    std::vector<double> times(fields.grid.n_steps);
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = fields.grid.midpoint(k);
    doc["times"] = times;
    ordered_json per_field = ordered_json::object();
    const auto names = field_names(problem);
    for (std::size_t f = 0; f < names.size(); ++f) per_field[names[f]] = fields.samples[f];
    doc["fields"] = per_field;
  }
  write_json(file, doc);
}

void write_trajectory_csv(const fs::path& file, const Problem& problem, const Config& best) {
  const auto rows = problem.populations(best);
  const TimeGrid& grid = problem.encoding()->grid();
  auto out = open_output(file);
  out << 't';
  for (const auto& name : population_names(problem)) out << ',' << name;
  out << '\n';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out << format_real(grid.start(k));
    for (double p : rows[k]) out << ',' << format_real(p);
    out << '\n';
  }
}

fs::path checkpoint_path(const fs::path& dir, std::size_t run, std::size_t iteration) {
  return dir / "checkpoints" /
         ("run_" + std::to_string(run) + "_iter_" + std::to_string(iteration) + ".json");
}

namespace {

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const EvaluationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DegenerateModel& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DegenerateElite& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IntegrationAccuracy& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

RunSpec prepare(const fs::path& spec_path, const CommandOptions& opts, fs::path& out_dir) {
  RunSpec spec = load_run_spec(spec_path);
  apply_overrides(spec, opts);
  out_dir = resolve_output_dir(spec, opts);
  fs::create_directories(out_dir);
  if (spec.checkpoint_every > 0) fs::create_directories(out_dir / "checkpoints");
  return spec;
}

MultiRunResult campaign(const RunSpec& spec, const OptimizerConfig& cfg, const fs::path& out_dir,
                        unsigned threads) {
  const Problem& problem = *spec.problem;
  const ObjectiveFn objective = [&problem](std::span<const int> x) { return problem.evaluate(x); };
  RunCallbackFactory callbacks;
  if (spec.checkpoint_every > 0) {
    const std::size_t every = spec.checkpoint_every;
    callbacks = [every, out_dir](std::size_t run) -> IterationCallback {
      return [every, out_dir, run](const IterationRecord& rec, const TensorTrain& tt) {
        if ((rec.iteration + 1) % every == 0)
          save_tensor_train(tt, checkpoint_path(out_dir, run, rec.iteration));
      };
    };
  }
  return multi_run(cfg, problem.local_dims(), objective, spec.n_runs, threads, callbacks);
}

} // namespace

int cmd_run(const fs::path& spec_path, const CommandOptions& opts, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    fs::path dir;
    const RunSpec spec = prepare(spec_path, opts, dir);
    const MultiRunResult result = campaign(spec, spec.optimizer, dir, opts.threads);

    write_convergence_csv(dir / "convergence.csv", result.runs);
    write_summary_csv(dir / "summary.csv", result.curve);
    const RunResult& best = result.runs[best_run_index(result.runs)];
    write_best_pulse_json(dir / "best_pulse.json", spec, best);
    if (spec.problem->is_quantum())
      write_trajectory_csv(dir / "trajectory.csv", *spec.problem, best.best_config);

    std::vector<double> finals;
    double seconds = 0.0;
    for (const auto& r : result.runs) {
      finals.push_back(r.best_objective);
      seconds += r.wall_seconds;
    }
    out << spec.problem_name << ": " << result.runs.size() << " runs, median best "
        << format_real(percentile(finals, 50.0)) << ", best " << format_real(best.best_objective)
        << ", " << seconds << " s of optimizer time; outputs in " << dir.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_lambda_sweep(const fs::path& spec_path, const std::vector<double>& lambdas,
                     const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (lambdas.empty()) throw ConfigError("--lambdas needs at least one value");
    fs::path dir;
    const RunSpec spec = prepare(spec_path, opts, dir);

    auto conv = open_output(dir / "convergence.csv");
    auto summary = open_output(dir / "summary.csv");
    conv << "lambda,run_id,iteration,evaluations,batch_best,best_so_far\n";
    summary << "lambda,evaluations,median,p16,p84\n";
    for (double lambda : lambdas) {
      OptimizerConfig cfg = spec.optimizer;
      cfg.update.lambda = lambda;
      try {
        validate(cfg, spec.problem->local_dims());
      } catch (const InvalidArgument& e) {
        throw ConfigError("lambda " + format_real(lambda) + ": " + e.what());
      }
      // Same base seed for every lambda, so run r is paired across lambdas.
      const MultiRunResult result = campaign(spec, cfg, dir, opts.threads);
      const std::string tag = format_real(lambda);
      for (std::size_t r = 0; r < result.runs.size(); ++r)
        for (const auto& rec : result.runs[r].history)
          conv << tag << ',' << r << ',' << rec.iteration << ',' << rec.evaluations << ','
               << format_real(rec.batch_best) << ',' << format_real(rec.best_so_far) << '\n';
      const AggregateCurve& c = result.curve;
      for (std::size_t i = 0; i < c.evaluations.size(); ++i)
        summary << tag << ',' << c.evaluations[i] << ',' << format_real(c.median[i]) << ','
                << format_real(c.p16[i]) << ',' << format_real(c.p84[i]) << '\n';
      out << "lambda " << tag << ": final median " << format_real(c.median.back()) << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

ToyResult run_toy(std::uint64_t seed, std::size_t samples, std::size_t chi, double eta,
                  std::size_t sweeps) {
  const std::vector<std::size_t> dims(4, 2);
  TensorTrain tt = TensorTrain::uniform(dims, chi);
  ToyResult res;
  for (int v = 0; v < 16; ++v) res.configs.push_back({(v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1});

  Rng rng(seed);
  auto measure = [&](const TensorTrain& model, std::vector<double>& enumerated,
                     std::vector<double>& empirical) {
    const double z = model.partition();
    for (const auto& x : res.configs) enumerated.push_back(model.score(x) / z);
    empirical.assign(16, 0.0);
    const SampleBatch batch = sample(model, rng, samples);
    for (const auto& x : batch.configs) empirical[(x[0] << 3) | (x[1] << 2) | (x[2] << 1) | x[3]] += 1.0;
    for (double& p : empirical) p /= static_cast<double>(samples);
  };
  measure(tt, res.pre_enumerated, res.pre_empirical);

  EliteSet elites;
  for (int v = 0; v < 4; ++v) {
    elites.configs.push_back(res.configs[v]);
    elites.values.push_back(0.0);
    elites.source_indices.push_back(static_cast<std::size_t>(v));
  }
  UpdateConfig cfg;
  cfg.eta = eta;
  cfg.sweeps = sweeps;
  cfg.lambda = 0.0;
  tt = sweep_update(tt, elites, cfg);
  measure(tt, res.post_enumerated, res.post_empirical);
  res.model = std::move(tt);
  return res;
}

int cmd_toy(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ToyResult res = run_toy(opts.seed.value_or(0));
    out << "config,pre_enumerated,pre_empirical,post_enumerated,post_empirical\n";
    double prefix_mass = 0.0;
    for (std::size_t i = 0; i < res.configs.size(); ++i) {
      for (int b : res.configs[i]) out << b;
      out << ',' << format_real(res.pre_enumerated[i]) << ',' << format_real(res.pre_empirical[i])
          << ',' << format_real(res.post_enumerated[i]) << ','
          << format_real(res.post_empirical[i]) << '\n';
      if (i < 4) prefix_mass += res.post_empirical[i];
    }
    err << "empirical mass on prefix 00 after update: " << format_real(prefix_mass) << '\n';
    return static_cast<int>(kExitOk);
  });
}

} // namespace tteda
