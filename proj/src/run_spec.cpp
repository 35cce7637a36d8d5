#include "tteda/run_spec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tteda/error.hpp"

namespace tteda {

using nlohmann::json;

namespace {

constexpr std::string_view kBenchmarkPrefix = "benchmark:";

const std::vector<std::string> kQuantumProblems = {
    "single_qubit_resonant", "single_qubit_detuned", "bell_pair", "qutrit_not", "stirap"};
const std::vector<std::string> kBenchmarks = {"alpine", "ackley", "rastrigin", "griewank",
                                              "schwefel"};

bool is_benchmark(std::string_view name) { return name.starts_with(kBenchmarkPrefix); }

// Preset configurations; every key can be overridden from the spec file.
json defaults_for(std::string_view name) {
  json d;
  d["runs"] = {{"n_runs", 20}, {"seed", 0}};
  d["output"] = {{"checkpoint_every", 0}};
  json opt = {{"epsilon", 0.02}, {"lambda", 0.0},  {"clip", 10.0},          {"fill", 1.0},
              {"floor", 1e-12},  {"target", nullptr}, {"bidirectional", false},
              {"resume_from", nullptr}};
  auto set_opt = [&](int k, int m, double eta, int sweeps, int chi, int levels, int budget) {
    opt["K"] = k;
    opt["M"] = m;
    opt["eta"] = eta;
    opt["sweeps"] = sweeps;
    opt["chi"] = chi;
    opt["d"] = levels;
    opt["budget"] = budget;
  };
  if (name == "single_qubit_resonant") {
    d["problem"] = {{"detuning", 0.0}, {"u0", 1.0}, {"duration", std::numbers::pi}, {"n_steps", 28}};
    d["encoding"] = {{"basis", "time_series"}, {"min", nullptr}, {"max", nullptr}};
    set_opt(12, 2, 0.07, 10, 4, 2, 1000);
  } else if (name == "single_qubit_detuned") {
    d["problem"] = {{"detuning", 1.0},
                    {"u0", 1.0},
                    {"duration", std::numbers::pi * std::numbers::sqrt2},
                    {"n_steps", 28}};
    d["encoding"] = {{"basis", "time_series"}, {"min", nullptr}, {"max", nullptr}};
    set_opt(20, 2, 0.06, 20, 5, 3, 2000);
  } else if (name == "bell_pair") {
    d["problem"] = {{"xi", 1.0}, {"duration", 2.5}, {"n_steps", 30}};
    d["encoding"] = {{"basis", "fourier"}, {"coefficients", 5},       {"min", -4.0},
                     {"max", 4.0},         {"layout", "interleaved"}};
    set_opt(15, 3, 0.06, 10, 2, 40, 3000);
  } else if (name == "qutrit_not") {
    d["problem"] = {{"anharmonicity", -1.0}, {"duration", 12.5}, {"n_steps", 50}};
    d["encoding"] = {{"basis", "piecewise"}, {"coefficients", 5},       {"min", -0.5},
                     {"max", 0.5},           {"layout", "interleaved"}};
    set_opt(20, 2, 0.07, 10, 4, 50, 20000);
  } else if (name == "stirap") {
    d["problem"] = {{"gamma", 5.0},  {"pump_detuning", 0.0}, {"substeps", 40},
                    {"duration", 1.0}, {"n_steps", 30}};
    d["encoding"] = {{"basis", "spline"}, {"coefficients", 10}, {"degree", 3},
                     {"min", 0.0},        {"max", 20.0},        {"layout", "interleaved"}};
    set_opt(20, 2, 0.06, 10, 5, 10, 10000);
  } else if (is_benchmark(name)) {
    d["problem"] = {{"dimension", 10}};
    d["encoding"] = json::object();
    set_opt(30, 5, 0.05, 5, 4, 16, 10000);
    opt["epsilon"] = 0.0;
    d["runs"]["n_runs"] = 10;
  }
  d["optimizer"] = opt;
  d["problem"]["name"] = std::string(name);
  return d;
}

class SpecContext {
public:
  SpecContext(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw ConfigError(std::string(source_) + ":" + std::to_string(line) + ": " + msg);
  }

  // Line of `"key"` inside `"section"`, or of the section itself.
  std::size_t line_of(std::string_view section, std::string_view key = {}) const {
    std::size_t pos = text_.find("\"" + std::string(section) + "\"");
    if (pos == std::string_view::npos) return 1;
    if (!key.empty()) {
      const std::size_t kpos = text_.find("\"" + std::string(key) + "\"", pos);
      if (kpos != std::string_view::npos) pos = kpos;
    }
    return line_at(pos);
  }

  std::size_t line_at(std::size_t byte) const {
    byte = std::min(byte, text_.size());
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + byte, '\n'));
  }

private:
  std::string_view text_;
  std::string_view source_;
};

template <class T>
T get_as(const json& section, const char* key, const SpecContext& ctx, std::string_view sec) {
  try {
    return section.at(key).get<T>();
  } catch (const json::exception&) {
    ctx.fail(ctx.line_of(sec, key), "'" + std::string(sec) + "." + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& section, const char* key, const SpecContext& ctx,
                      std::string_view sec, std::size_t min_value = 1) {
  const json& v = section.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value))
    ctx.fail(ctx.line_of(sec, key), "'" + std::string(sec) + "." + key +
                                        "' must be an integer >= " + std::to_string(min_value));
  return v.get<std::size_t>();
}

double get_real(const json& section, const char* key, const SpecContext& ctx, std::string_view sec) {
  const json& v = section.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>()))
    ctx.fail(ctx.line_of(sec, key), "'" + std::string(sec) + "." + key + "' must be a number");
  return v.get<double>();
}

Layout parse_layout(const json& enc, const SpecContext& ctx) {
  const auto s = get_as<std::string>(enc, "layout", ctx, "encoding");
  if (s == "interleaved") return Layout::Interleaved;
  if (s == "separate") return Layout::Separate;
  ctx.fail(ctx.line_of("encoding", "layout"), "layout must be 'interleaved' or 'separate'");
}

Basis parse_basis(const json& enc, const SpecContext& ctx) {
  const auto s = get_as<std::string>(enc, "basis", ctx, "encoding");
  if (s == "time_series") return TimeSeriesBasis{};
  if (s == "piecewise") return PiecewiseBasis{get_count(enc, "coefficients", ctx, "encoding")};
  if (s == "fourier")
    return FourierBasis{get_count(enc, "coefficients", ctx, "encoding", 0)};
  if (s == "spline") {
    const auto degree = get_count(enc, "degree", ctx, "encoding", 0);
    return SplineBasis{get_count(enc, "coefficients", ctx, "encoding"), static_cast<int>(degree)};
  }
  ctx.fail(ctx.line_of("encoding", "basis"),
           "basis must be one of time_series, piecewise, fourier, spline");
}

Problem build_problem(const std::string& name, const json& prob, const json& enc,
                      std::size_t levels, const SpecContext& ctx) {
  if (is_benchmark(name)) {
    const auto kind = benchmark_from_name(std::string_view(name).substr(kBenchmarkPrefix.size()));
    return Problem(BenchmarkFunction{kind, get_count(prob, "dimension", ctx, "problem"), levels},
                   std::nullopt);
  }
  const double duration = get_real(prob, "duration", ctx, "problem");
  if (!(duration > 0.0)) ctx.fail(ctx.line_of("problem", "duration"), "duration must be positive");
  const TimeGrid grid(duration, get_count(prob, "n_steps", ctx, "problem"));

  Basis basis = parse_basis(enc, ctx);
  const Layout layout = enc.contains("layout") ? parse_layout(enc, ctx) : Layout::Interleaved;

  auto range = [&](double lo_default, double hi_default) {
    const double lo = enc.at("min").is_null() ? lo_default : get_real(enc, "min", ctx, "encoding");
    const double hi = enc.at("max").is_null() ? hi_default : get_real(enc, "max", ctx, "encoding");
    if (!(lo < hi)) ctx.fail(ctx.line_of("encoding", "min"), "encoding range needs min < max");
    return ValueMap::uniform(lo, hi, levels);
  };

  if (name == "single_qubit_resonant" || name == "single_qubit_detuned") {
    const double u0 = get_real(prob, "u0", ctx, "problem");
    if (!(u0 > 0.0)) ctx.fail(ctx.line_of("problem", "u0"), "u0 must be positive");
    SingleQubit model{get_real(prob, "detuning", ctx, "problem"), u0};
    ControlEncoding encoding(basis, {range(-u0, u0)}, grid, layout);
    return Problem(StateTransfer{model, CVector::Unit(2, 0), CVector::Unit(2, 1)},
                   std::move(encoding));
  }
  if (name == "bell_pair") {
    const double xi = get_real(prob, "xi", ctx, "problem");
    if (!(xi > 0.0)) ctx.fail(ctx.line_of("problem", "xi"), "xi must be positive");
    const ValueMap map = range(-4.0, 4.0);
    ControlEncoding encoding(basis, {map, map}, grid, layout);
    return Problem(StateTransfer{BellTriplet{xi}, CVector::Unit(3, 0), CVector::Unit(3, 1)},
                   std::move(encoding));
  }
  if (name == "qutrit_not") {
    QutritLadder model{get_real(prob, "anharmonicity", ctx, "problem")};
    const ValueMap map = range(-0.5, 0.5);
    ControlEncoding encoding(basis, {map, map}, grid, layout);
    return Problem(GateSynthesis{model, embedded_not(3)}, std::move(encoding));
  }
  // stirap
  const double gamma = get_real(prob, "gamma", ctx, "problem");
  if (gamma < 0.0) ctx.fail(ctx.line_of("problem", "gamma"), "gamma must be non-negative");
  Stirap model{get_real(prob, "pump_detuning", ctx, "problem"), gamma};
  const ValueMap map = range(0.0, 20.0);
  ControlEncoding encoding(basis, {map, map}, grid, layout);
  return Problem(OpenTransfer{model, 0, 2, get_count(prob, "substeps", ctx, "problem")},
                 std::move(encoding));
}

std::string problem_name_of(const json& doc, const SpecContext& ctx) {
  if (!doc.contains("problem") || !doc["problem"].is_object() || !doc["problem"].contains("name"))
    ctx.fail(ctx.line_of("problem"), "missing 'problem.name'");
  const json& n = doc["problem"]["name"];
  if (!n.is_string()) ctx.fail(ctx.line_of("problem", "name"), "'problem.name' must be a string");
  const auto name = n.get<std::string>();
  const auto known = known_problems();
  if (std::find(known.begin(), known.end(), name) == known.end())
    ctx.fail(ctx.line_of("problem", "name"), "unknown problem '" + name + "'");
  return name;
}

RunSpec resolve(const json& doc, const SpecContext& ctx) {
  if (!doc.is_object()) ctx.fail(1, "spec must be a JSON object");
  const std::string name = problem_name_of(doc, ctx);
  json merged = defaults_for(name);

  for (const auto& [section, value] : doc.items()) {
    if (!merged.contains(section)) ctx.fail(ctx.line_of(section), "unknown section '" + section + "'");
    if (!value.is_object()) ctx.fail(ctx.line_of(section), "section '" + section + "' must be an object");
    for (const auto& [key, v] : value.items()) {
      json& target = merged[section];
      const bool allowed = target.contains(key) || (section == "output" && key == "dir") ||
                           (section == "encoding" && !is_benchmark(name) &&
                            (key == "coefficients" || key == "degree" || key == "layout"));
      if (!allowed)
        ctx.fail(ctx.line_of(section, key), "unknown key '" + section + "." + key + "'");
      target[key] = v;
    }
  }

  RunSpec spec;
  spec.problem_name = name;
  const json& opt = merged["optimizer"];
  OptimizerConfig& o = spec.optimizer;
  o.batch_size = get_count(opt, "K", ctx, "optimizer");
  o.elite_count = get_count(opt, "M", ctx, "optimizer");
  o.update.eta = get_real(opt, "eta", ctx, "optimizer");
  o.update.sweeps = get_count(opt, "sweeps", ctx, "optimizer");
  o.chi = get_count(opt, "chi", ctx, "optimizer");
  const std::size_t levels = get_count(opt, "d", ctx, "optimizer", 2);
  o.epsilon = get_real(opt, "epsilon", ctx, "optimizer");
  o.update.lambda = get_real(opt, "lambda", ctx, "optimizer");
  o.update.clip_norm = opt.at("clip").is_null()
                           ? std::nullopt
                           : std::optional<double>(get_real(opt, "clip", ctx, "optimizer"));
  o.update.bidirectional = get_as<bool>(opt, "bidirectional", ctx, "optimizer");
  o.budget = get_count(opt, "budget", ctx, "optimizer");
  o.fill = get_real(opt, "fill", ctx, "optimizer");
  o.floor = get_real(opt, "floor", ctx, "optimizer");
  if (!opt.at("target").is_null()) o.target = get_real(opt, "target", ctx, "optimizer");
  spec.n_runs = get_count(merged["runs"], "n_runs", ctx, "runs");
  const json& seed = merged["runs"]["seed"];
  if (!seed.is_number_integer() || seed.get<long long>() < 0)
    ctx.fail(ctx.line_of("runs", "seed"), "'runs.seed' must be a non-negative integer");
  o.seed = seed.get<std::uint64_t>();
  if (merged["output"].contains("dir"))
    spec.output_dir = get_as<std::string>(merged["output"], "dir", ctx, "output");
  spec.checkpoint_every = get_count(merged["output"], "checkpoint_every", ctx, "output", 0);

  try {
    spec.problem.emplace(build_problem(name, merged["problem"], merged["encoding"], levels, ctx));
  } catch (const InvalidArgument& e) {
    ctx.fail(ctx.line_of("encoding"), e.what());
  }
  const auto dims = spec.problem->local_dims();
  try {
    validate(o, dims);
  } catch (const InvalidArgument& e) {
    ctx.fail(ctx.line_of("optimizer"), e.what());
  }
  if (!opt.at("resume_from").is_null()) {
    const auto path = get_as<std::string>(opt, "resume_from", ctx, "optimizer");
    try {
      TensorTrain tt = load_tensor_train(path);
      if (tt.local_dims() != dims)
        ctx.fail(ctx.line_of("optimizer", "resume_from"),
                 "checkpoint local dimensions do not match the problem");
      o.initial_model = std::move(tt);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      ctx.fail(ctx.line_of("optimizer", "resume_from"), e.what());
    }
  }
  return spec;
}

} // namespace

std::vector<std::string> known_problems() {
  std::vector<std::string> out = kQuantumProblems;
  for (const auto& b : kBenchmarks) out.push_back(std::string(kBenchmarkPrefix) + b);
  return out;
}

RunSpec parse_run_spec(std::string_view text, std::string_view source) {
  const SpecContext ctx(text, source);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    ctx.fail(ctx.line_at(e.byte > 0 ? e.byte - 1 : 0), std::string("malformed JSON: ") + e.what());
  }
  return resolve(doc, ctx);
}

RunSpec load_run_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ":1: cannot open spec file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_spec(ss.str(), path.string());
}

RunSpec default_run_spec(std::string_view problem_name) {
  const json doc = {{"problem", {{"name", std::string(problem_name)}}}};
  const std::string text = doc.dump();
  return parse_run_spec(text, "defaults");
}

std::vector<std::string> field_names(const Problem& problem) {
  return std::visit(
      [](const auto& spec) -> std::vector<std::string> {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, BenchmarkFunction>) {
          return {};
        } else if constexpr (std::is_same_v<S, OpenTransfer>) {
          return {"pump", "stokes"};
        } else {
          if (std::holds_alternative<SingleQubit>(spec.model)) return {"u"};
          if (std::holds_alternative<BellTriplet>(spec.model)) return {"rabi", "detuning"};
          if (std::holds_alternative<QutritLadder>(spec.model)) return {"c_x", "c_y"};
          return {"pump", "stokes"};
        }
      },
      problem.objective());
}

std::vector<std::string> population_names(const Problem& problem) {
  return std::visit(
      [](const auto& spec) -> std::vector<std::string> {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, BenchmarkFunction>) {
          return {};
        } else if constexpr (std::is_same_v<S, OpenTransfer>) {
          return {"p_g", "p_e", "p_r", "p_s"};
        } else {
          if (std::holds_alternative<SingleQubit>(spec.model)) return {"p_0", "p_1"};
          if (std::holds_alternative<BellTriplet>(spec.model)) return {"p_dd", "p_du_plus", "p_uu"};
          if (std::holds_alternative<QutritLadder>(spec.model)) return {"p_0", "p_1", "p_2"};
          return {"p_g", "p_e", "p_r", "p_s"};
        }
      },
      problem.objective());
}

} // namespace tteda
