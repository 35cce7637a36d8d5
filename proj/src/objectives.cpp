#include "tteda/objectives.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "tteda/error.hpp"

namespace tteda {

using namespace std::complex_literals;

double checked_unit_interval(double value) {
  if (!(value >= -1e-9 && value <= 1.0 + 1e-9))
    throw DegenerateModel("objective value " + std::to_string(value) + " outside [0, 1]");
  return std::clamp(value, 0.0, 1.0);
}

double state_infidelity(const CVector& psi, const CVector& target) {
  if (psi.size() != target.size()) throw InvalidArgument("state dimensions differ");
  return checked_unit_interval(1.0 - std::norm(target.dot(psi)));
}

double gate_infidelity(const CMatrix& u, const CMatrix& u_target) {
  if (u.rows() != u.cols() || u.rows() < 2 || u_target.rows() != u.rows() ||
      u_target.cols() != u.cols())
    throw InvalidArgument("gate matrices must be square, equal-sized and at least 2x2");
  const double r = 1.0 / std::sqrt(2.0);
  const std::array<std::array<std::complex<double>, 2>, 6> axis_states{{
      {r, r}, {r, -r}, {r, 1i * r}, {r, -1i * r}, {1.0, 0.0}, {0.0, 1.0}}};
  const CMatrix m = u_target.adjoint() * u;
  double sum = 0.0;
  for (const auto& s : axis_states) {
    std::complex<double> amp = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) amp += std::conj(s[a]) * m(a, b) * s[b];
    sum += std::norm(amp);
  }
  return checked_unit_interval(1.0 - sum / 6.0);
}

double open_infidelity(const CMatrix& rho, std::size_t target_level) {
  if (target_level >= static_cast<std::size_t>(rho.rows()))
    throw InvalidArgument("target level outside density matrix");
  const auto t = static_cast<Eigen::Index>(target_level);
  return checked_unit_interval(1.0 - rho(t, t).real());
}

BenchmarkKind benchmark_from_name(std::string_view name) {
  if (name == "alpine") return BenchmarkKind::Alpine;
  if (name == "ackley") return BenchmarkKind::Ackley;
  if (name == "rastrigin") return BenchmarkKind::Rastrigin;
  if (name == "griewank") return BenchmarkKind::Griewank;
  if (name == "schwefel") return BenchmarkKind::Schwefel;
  throw InvalidArgument("unknown benchmark function '" + std::string(name) + "'");
}

std::string_view benchmark_name(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::Alpine: return "alpine";
    case BenchmarkKind::Ackley: return "ackley";
    case BenchmarkKind::Rastrigin: return "rastrigin";
    case BenchmarkKind::Griewank: return "griewank";
    case BenchmarkKind::Schwefel: return "schwefel";
  }
  return "";
}

double benchmark_bound(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::Alpine: return 10.0;
    case BenchmarkKind::Ackley: return 32.768;
    case BenchmarkKind::Rastrigin: return 5.12;
    case BenchmarkKind::Griewank: return 600.0;
    case BenchmarkKind::Schwefel: return 500.0;
  }
  return 0.0;
}

double benchmark_eval(BenchmarkKind kind, std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("benchmark needs at least one coordinate");
  const double bound = benchmark_bound(kind);
  for (double x : v)
    if (!(std::abs(x) <= bound)) throw InvalidArgument("coordinate outside benchmark box");
  const double n = static_cast<double>(v.size());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double f = 0.0;
  switch (kind) {
    case BenchmarkKind::Alpine:
      for (double x : v) f += std::abs(x * std::sin(x) + 0.1 * x);
      return f;
    case BenchmarkKind::Ackley: {
      double sq = 0.0, cs = 0.0;
      for (double x : v) {
        sq += x * x;
        cs += std::cos(two_pi * x);
      }
      return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
    }
    case BenchmarkKind::Rastrigin:
      f = 10.0 * n;
      for (double x : v) f += x * x - 10.0 * std::cos(two_pi * x);
      return f;
    case BenchmarkKind::Griewank: {
      double sq = 0.0, prod = 1.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        sq += v[i] * v[i];
        prod *= std::cos(v[i] / std::sqrt(static_cast<double>(i + 1)));
      }
      return 1.0 + sq / 4000.0 - prod;
    }
    case BenchmarkKind::Schwefel:
      f = 418.9829 * n;
      for (double x : v) f -= x * std::sin(std::sqrt(std::abs(x)));
      return f;
  }
  return f;
}

CMatrix embedded_not(std::size_t dim) {
  if (dim < 2) throw InvalidArgument("NOT needs at least two levels");
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix u = CMatrix::Identity(n, n);
  u(0, 0) = u(1, 1) = 0.0;
  u(0, 1) = u(1, 0) = 1.0;
  return u;
}

namespace {

const DynamicsModel* model_of(const ObjectiveSpec& spec, DynamicsModel& scratch) {
  if (const auto* s = std::get_if<StateTransfer>(&spec)) return &s->model;
  if (const auto* g = std::get_if<GateSynthesis>(&spec)) return &g->model;
  if (const auto* o = std::get_if<OpenTransfer>(&spec)) {
    scratch = o->model;
    return &scratch;
  }
  return nullptr;
}

} // namespace

Problem::Problem(ObjectiveSpec objective, std::optional<ControlEncoding> encoding)
    : objective_(std::move(objective)), encoding_(std::move(encoding)) {
  if (const auto* b = std::get_if<BenchmarkFunction>(&objective_)) {
    if (b->dimension == 0) throw InvalidArgument("benchmark dimension must be positive");
    const double bound = benchmark_bound(b->kind);
    benchmark_map_ = ValueMap::uniform(-bound, bound, b->levels);
    return;
  }
  if (!encoding_) throw InvalidArgument("quantum objectives need a control encoding");
  DynamicsModel scratch;
  const DynamicsModel* model = model_of(objective_, scratch);
  if (encoding_->field_count() != field_count(*model))
    throw InvalidArgument("encoding has " + std::to_string(encoding_->field_count()) +
                          " fields but the model needs " + std::to_string(field_count(*model)));
  const auto dim = static_cast<Eigen::Index>(dimension(*model));
  if (const auto* s = std::get_if<StateTransfer>(&objective_)) {
    if (s->initial.size() != dim || s->target.size() != dim)
      throw InvalidArgument("state dimension does not match the model");
    if (std::abs(s->initial.norm() - 1.0) > 1e-9 || std::abs(s->target.norm() - 1.0) > 1e-9)
      throw InvalidArgument("initial and target states must be normalized");
  }
  if (const auto* g = std::get_if<GateSynthesis>(&objective_)) {
    if (g->target.rows() != dim || g->target.cols() != dim)
      throw InvalidArgument("target gate dimension does not match the model");
    const CMatrix block = g->target.topLeftCorner(2, 2);
    if ((block.adjoint() * block - CMatrix::Identity(2, 2)).norm() > 1e-9)
      throw InvalidArgument("target gate must be unitary on the computational subspace");
  }
  if (const auto* o = std::get_if<OpenTransfer>(&objective_)) {
    if (o->initial_level >= 4 || o->target_level >= 4)
      throw InvalidArgument("open-system levels must lie in {g, e, r, s}");
  }
}

std::vector<std::size_t> Problem::local_dims() const {
  if (const auto* b = std::get_if<BenchmarkFunction>(&objective_))
    return std::vector<std::size_t>(b->dimension, b->levels);
  return encoding_->local_dims();
}

ControlFields Problem::decode(std::span<const int> x) const {
  if (!encoding_) throw InvalidArgument("benchmark problems have no control fields");
  return encoding_->decode(x);
}

std::vector<double> Problem::coordinates(std::span<const int> x) const {
  const auto* b = std::get_if<BenchmarkFunction>(&objective_);
  if (!b) throw InvalidArgument("only benchmark problems have coordinates");
  if (x.size() != b->dimension) throw InvalidArgument("configuration length mismatch");
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = benchmark_map_->at(x[i]);
  return v;
}

namespace {

CMatrix basis_density(std::size_t level) {
  CMatrix rho = CMatrix::Zero(4, 4);
  rho(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level)) = 1.0;
  return rho;
}

} // namespace

double Problem::evaluate(std::span<const int> x) const {
  return std::visit(
      [&](const auto& spec) -> double {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, BenchmarkFunction>) {
          return benchmark_eval(spec.kind, coordinates(x));
        } else if constexpr (std::is_same_v<S, StateTransfer>) {
          const auto evo = propagate_schrodinger(spec.model, encoding_->decode(x), spec.initial);
          return state_infidelity(evo.state, spec.target);
        } else if constexpr (std::is_same_v<S, GateSynthesis>) {
          const auto dim = static_cast<Eigen::Index>(dimension(spec.model));
          const auto evo = propagate_schrodinger(spec.model, encoding_->decode(x),
                                                 CVector::Unit(dim, 0));
          return gate_infidelity(evo.propagator, spec.target);
        } else {
          const CMatrix rho = propagate_lindblad(spec.model, encoding_->decode(x),
                                                 basis_density(spec.initial_level), spec.substeps);
          return open_infidelity(rho, spec.target_level);
        }
      },
      objective_);
}

std::vector<std::vector<double>> Problem::populations(std::span<const int> x) const {
  std::vector<std::vector<double>> rows;
  std::visit(
      [&](const auto& spec) {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, BenchmarkFunction>) {
          throw InvalidArgument("benchmark problems have no dynamics");
        } else if constexpr (std::is_same_v<S, OpenTransfer>) {
          propagate_lindblad(spec.model, encoding_->decode(x), basis_density(spec.initial_level),
                             spec.substeps, [&](std::size_t, const CMatrix& rho) {
                               std::vector<double> p(4);
                               for (int i = 0; i < 4; ++i) p[i] = rho(i, i).real();
                               rows.push_back(std::move(p));
                             });
        } else {
          CVector psi0;
          if constexpr (std::is_same_v<S, StateTransfer>)
            psi0 = spec.initial;
          else
            psi0 = CVector::Unit(static_cast<Eigen::Index>(dimension(spec.model)), 0);
          propagate_schrodinger(spec.model, encoding_->decode(x), psi0,
                                [&](std::size_t, const CVector& psi) {
                                  std::vector<double> p(static_cast<std::size_t>(psi.size()));
                                  for (Eigen::Index i = 0; i < psi.size(); ++i)
                                    p[static_cast<std::size_t>(i)] = std::norm(psi(i));
                                  rows.push_back(std::move(p));
                                });
        }
      },
      objective_);
  return rows;
}

} // namespace tteda
