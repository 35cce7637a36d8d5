#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <sstream>

#include "tteda/commands.hpp"
#include "tteda/engine.hpp"
#include "tteda/error.hpp"
#include "tteda/objectives.hpp"
#include "tteda/run_spec.hpp"
#include "tteda/sampler.hpp"
#include "tteda/tensor_train.hpp"
#include "tteda/updater.hpp"

namespace py = pybind11;
using namespace tteda;

namespace {

py::array_t<double> core_to_array(const Core& c) {
  py::array_t<double> a({c.left(), c.phys(), c.right()});
  std::copy(c.data().begin(), c.data().end(), a.mutable_data());
  return a;
}

Core array_to_core(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3) throw InvalidArgument("cores must be 3-dimensional arrays");
  Core c(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
         static_cast<std::size_t>(a.shape(2)));
  std::copy(a.data(), a.data() + a.size(), c.data().begin());
  return c;
}

EliteSet make_elites(const std::vector<Config>& configs) {
  EliteSet e;
  e.configs = configs;
  e.values.assign(configs.size(), 0.0);
  for (std::size_t i = 0; i < configs.size(); ++i) e.source_indices.push_back(i);
  return e;
}

py::dict run_to_dict(const RunResult& r) {
  py::dict d;
  d["best_config"] = r.best_config;
  d["best_objective"] = r.best_objective;
  std::vector<std::size_t> evals;
  std::vector<double> batch_best, best;
  for (const auto& rec : r.history) {
    evals.push_back(rec.evaluations);
    batch_best.push_back(rec.batch_best);
    best.push_back(rec.best_so_far);
  }
  d["evaluations"] = evals;
  d["batch_best"] = batch_best;
  d["best_so_far"] = best;
  d["final_model"] = r.final_model;
  return d;
}

RunSpec spec_from_text(const std::string& text, std::optional<std::uint64_t> seed,
                       std::optional<std::size_t> budget) {
  RunSpec spec = parse_run_spec(text, "spec");
  CommandOptions opts;
  opts.seed = seed;
  opts.budget = budget;
  apply_overrides(spec, opts);
  return spec;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tensor-train estimation-of-distribution optimizer";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DegenerateModel>(m, "DegenerateModel", PyExc_ArithmeticError);
  py::register_exception<DegenerateElite>(m, "DegenerateElite", PyExc_ArithmeticError);
  py::register_exception<IntegrationAccuracy>(m, "IntegrationAccuracy", PyExc_ArithmeticError);

  py::class_<TensorTrain>(m, "TensorTrain")
      .def(py::init([](const std::vector<py::array_t<double, py::array::c_style |
                                                             py::array::forcecast>>& cores) {
             std::vector<Core> cs;
             for (const auto& a : cores) cs.push_back(array_to_core(a));
             return TensorTrain(std::move(cs));
           }),
           py::arg("cores"))
      .def_static("uniform",
                  [](const std::vector<std::size_t>& dims, std::size_t chi, double fill) {
                    return TensorTrain::uniform(dims, chi, fill);
                  },
                  py::arg("local_dims"), py::arg("chi"), py::arg("fill") = 1.0)
      .def_static("from_json", &tensor_train_from_json)
      .def("to_json", [](const TensorTrain& tt) { return tensor_train_to_json(tt); })
      .def_property_readonly("length", &TensorTrain::length)
      .def_property_readonly("local_dims", &TensorTrain::local_dims)
      .def_property_readonly("cores",
                             [](const TensorTrain& tt) {
                               py::list out;
                               for (const auto& c : tt.cores()) out.append(core_to_array(c));
                               return out;
                             })
      .def("score", [](const TensorTrain& tt, const Config& x) { return tt.score(x); })
      .def("partition", &TensorTrain::partition)
      .def("renormalized", &TensorTrain::renormalized);

  m.def("sample",
        [](const TensorTrain& tt, std::size_t count, std::uint64_t seed) {
          Rng rng(seed);
          return sample(tt, rng, count).configs;
        },
        py::arg("tt"), py::arg("count"), py::arg("seed") = 0,
        "Draw `count` configurations from the model's distribution.");

  m.def("elite_logscore_gradient",
        [](const TensorTrain& tt, const std::vector<Config>& elites, std::size_t k) {
          return core_to_array(elite_logscore_gradient(tt, make_elites(elites), k));
        });
  m.def("logz_gradient", [](const TensorTrain& tt, std::size_t k) {
    return core_to_array(logz_gradient(tt, k));
  });

  m.def("sweep_update",
        [](const TensorTrain& tt, const std::vector<Config>& elites, double eta,
           std::size_t sweeps, std::optional<double> clip_norm, double lambda, bool bidirectional) {
          UpdateConfig cfg;
          cfg.eta = eta;
          cfg.sweeps = sweeps;
          cfg.clip_norm = clip_norm;
          cfg.lambda = lambda;
          cfg.bidirectional = bidirectional;
          return sweep_update(tt, make_elites(elites), cfg);
        },
        py::arg("tt"), py::arg("elites"), py::arg("eta") = 0.05, py::arg("sweeps") = 10,
        py::arg("clip_norm") = 10.0, py::arg("lam") = 0.0, py::arg("bidirectional") = false);

  m.def("benchmark",
        [](const std::string& name, const std::vector<double>& x) {
          return benchmark_eval(benchmark_from_name(name), x);
        },
        py::arg("name"), py::arg("x"));

  m.def("known_problems", &known_problems);

  py::class_<RunSpec>(m, "RunSpec")
      .def_static(
          "parse",
          [](const std::string& text, std::optional<std::uint64_t> seed,
             std::optional<std::size_t> budget) { return spec_from_text(text, seed, budget); },
          py::arg("text"), py::arg("seed") = py::none(), py::arg("budget") = py::none())
      .def_static("defaults", [](const std::string& name) { return default_run_spec(name); })
      .def_readonly("problem_name", &RunSpec::problem_name)
      .def_readonly("n_runs", &RunSpec::n_runs)
      .def_property_readonly("local_dims", [](const RunSpec& s) { return s.problem->local_dims(); })
      .def_property_readonly("budget", [](const RunSpec& s) { return s.optimizer.budget; })
      .def_property_readonly("seed", [](const RunSpec& s) { return s.optimizer.seed; })
      .def("evaluate", [](const RunSpec& s, const Config& x) { return s.problem->evaluate(x); })
      .def("decode",
           [](const RunSpec& s, const Config& x) {
             py::dict d;
             if (!s.problem->is_quantum()) return d;
             const ControlFields f = s.problem->decode(x);
             const auto names = field_names(*s.problem);
             for (std::size_t i = 0; i < names.size(); ++i) d[py::str(names[i])] = f.samples[i];
             return d;
           })
      .def("populations",
           [](const RunSpec& s, const Config& x) { return s.problem->populations(x); });

  m.def("optimize",
        [](const RunSpec& spec, std::optional<std::uint64_t> seed) {
          OptimizerConfig cfg = spec.optimizer;
          if (seed) cfg.seed = *seed;
          const Problem& p = *spec.problem;
          RunResult r;
          {
            py::gil_scoped_release release;
            r = optimize(cfg, p.local_dims(), [&p](std::span<const int> x) { return p.evaluate(x); });
          }
          return run_to_dict(r);
        },
        py::arg("spec"), py::arg("seed") = py::none(),
        "Single optimizer run on a spec's problem.");

  m.def("optimize_function",
        [](const py::function& objective, const std::vector<std::size_t>& local_dims,
           std::size_t batch_size, std::size_t elite_count, std::size_t chi, double eta,
           std::size_t sweeps, double epsilon, double lambda, std::size_t budget,
           std::uint64_t seed) {
          OptimizerConfig cfg;
          cfg.batch_size = batch_size;
          cfg.elite_count = elite_count;
          cfg.chi = chi;
          cfg.update.eta = eta;
          cfg.update.sweeps = sweeps;
          cfg.epsilon = epsilon;
          cfg.update.lambda = lambda;
          cfg.budget = budget;
          cfg.seed = seed;
          const auto r = optimize(cfg, local_dims, [&objective](std::span<const int> x) {
            return objective(Config(x.begin(), x.end())).cast<double>();
          });
          return run_to_dict(r);
        },
        py::arg("objective"), py::arg("local_dims"), py::arg("batch_size") = 12,
        py::arg("elite_count") = 2, py::arg("chi") = 4, py::arg("eta") = 0.05,
        py::arg("sweeps") = 10, py::arg("epsilon") = 0.02, py::arg("lam") = 0.0,
        py::arg("budget") = 1000, py::arg("seed") = 0,
        "Minimize a Python callable over integer configurations.");

  m.def("run_toy",
        [](std::uint64_t seed, std::size_t samples) {
          const ToyResult r = run_toy(seed, samples);
          py::dict d;
          d["configs"] = r.configs;
          d["pre_enumerated"] = r.pre_enumerated;
          d["pre_empirical"] = r.pre_empirical;
          d["post_enumerated"] = r.post_enumerated;
          d["post_empirical"] = r.post_empirical;
          return d;
        },
        py::arg("seed") = 0, py::arg("samples") = 10000);

  m.def("cmd_run",
        [](const std::filesystem::path& spec_path, std::optional<std::filesystem::path> out,
           std::optional<std::uint64_t> seed, std::optional<std::size_t> budget,
           unsigned threads) {
          CommandOptions opts{seed, budget, out, threads};
          std::ostringstream sout, serr;
          int code;
          {
            py::gil_scoped_release release;
            code = cmd_run(spec_path, opts, sout, serr);
          }
          return py::make_tuple(code, sout.str(), serr.str());
        },
        py::arg("spec_path"), py::arg("out") = py::none(), py::arg("seed") = py::none(),
        py::arg("budget") = py::none(), py::arg("threads") = 1,
        "Run the `run` command; returns (exit_code, stdout, stderr).");
}
