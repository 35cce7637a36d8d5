#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tteda/error.hpp"
#include "tteda/objectives.hpp"
#include "tteda/tensor_train.hpp"

using namespace tteda;
using namespace std::complex_literals;

namespace {

CMatrix random_su2(std::mt19937& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  double a = n(gen), b = n(gen), c = n(gen), d = n(gen);
  const double r = std::sqrt(a * a + b * b + c * c + d * d);
  a /= r, b /= r, c /= r, d /= r;
  CMatrix u(2, 2);
  u << std::complex<double>(a, b), std::complex<double>(c, d), std::complex<double>(-c, d),
      std::complex<double>(a, -b);
  return u;
}

Problem qubit_problem(double delta) {
  const TimeGrid g(std::numbers::pi, 28);
  ControlEncoding enc(TimeSeriesBasis{}, {ValueMap::uniform(-1, 1, 2)}, g, Layout::Interleaved);
  return Problem(StateTransfer{SingleQubit{delta, 1.0}, CVector::Unit(2, 0), CVector::Unit(2, 1)},
                 std::move(enc));
}

} // namespace

TEST(StateInfidelity, OrthogonalAndEqualStates) {
  EXPECT_NEAR(state_infidelity(CVector::Unit(2, 0), CVector::Unit(2, 0)), 0.0, 1e-15);
  EXPECT_NEAR(state_infidelity(CVector::Unit(2, 0), CVector::Unit(2, 1)), 1.0, 1e-15);
  CVector phase = CVector::Unit(2, 1) * std::exp(0.7i);
  EXPECT_NEAR(state_infidelity(phase, CVector::Unit(2, 1)), 0.0, 1e-15);
  EXPECT_THROW(state_infidelity(CVector::Unit(3, 0), CVector::Unit(2, 0)), InvalidArgument);
}

TEST(GateInfidelity, MatchesTraceFormulaForQubitUnitaries) {
  // For unitaries on a qubit, the six-state average fidelity is (2 + |tr(U^dag V)|^2) / 6.
  std::mt19937 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix u = random_su2(gen), v = random_su2(gen);
    const double tr = std::norm((u.adjoint() * v).trace());
    EXPECT_NEAR(gate_infidelity(v, u), 1.0 - (2.0 + tr) / 6.0, 1e-12);
  }
}

TEST(GateInfidelity, EmbeddedTargetIgnoresSpectatorPhase) {
  CMatrix u = embedded_not(3);
  u(2, 2) = std::exp(1.3i);
  EXPECT_NEAR(gate_infidelity(u, embedded_not(3)), 0.0, 1e-15);
  // Global phase on the subspace does not matter either.
  EXPECT_NEAR(gate_infidelity(std::exp(0.4i) * embedded_not(3), embedded_not(3)), 0.0, 1e-15);
  // Identity vs NOT: only |+> and |-> survive, each with fidelity 1.
  EXPECT_NEAR(gate_infidelity(CMatrix::Identity(3, 3), embedded_not(3)), 2.0 / 3.0, 1e-15);
}

TEST(GateInfidelity, LeakageCountsAsError) {
  // Full swap of |1> and |2>: |1> leaks out of the computational subspace.
  CMatrix u = CMatrix::Zero(3, 3);
  u(0, 0) = 1.0;
  u(2, 1) = 1.0;
  u(1, 2) = 1.0;
  // Surviving amplitude per axis state: |<s|P_0|s>|^2 = |s_0|^4, averaged:
  // four equator states 1/4 each, |0> gives 1, |1> gives 0.
  EXPECT_NEAR(gate_infidelity(u, CMatrix::Identity(3, 3)), 1.0 - 2.0 / 6.0, 1e-15);
}

TEST(OpenInfidelity, ReadsTargetPopulation) {
  CMatrix rho = CMatrix::Zero(4, 4);
  rho(0, 0) = 0.25;
  rho(2, 2) = 0.7;
  rho(3, 3) = 0.05;
  EXPECT_NEAR(open_infidelity(rho, 2), 0.3, 1e-15);
  EXPECT_THROW(open_infidelity(rho, 4), InvalidArgument);
}

TEST(Benchmarks, KnownMinima) {
  const std::vector<double> zero(10, 0.0);
  EXPECT_NEAR(benchmark_eval(BenchmarkKind::Ackley, zero), 0.0, 1e-12);
  EXPECT_NEAR(benchmark_eval(BenchmarkKind::Rastrigin, zero), 0.0, 1e-12);
  EXPECT_NEAR(benchmark_eval(BenchmarkKind::Griewank, zero), 0.0, 1e-12);
  EXPECT_NEAR(benchmark_eval(BenchmarkKind::Alpine, zero), 0.0, 1e-12);
  const std::vector<double> schwefel_min(10, 420.9687);
  EXPECT_NEAR(benchmark_eval(BenchmarkKind::Schwefel, schwefel_min), 0.0, 1e-3);
}

TEST(Benchmarks, HandComputedPoints) {
  std::vector<double> x(10, 0.0);
  x[0] = 1.0;
  EXPECT_NEAR(benchmark_eval(BenchmarkKind::Rastrigin, x), 1.0, 1e-12);
  // Griewank at (pi*sqrt(1)... ) single coordinate: 1 + x^2/4000 - cos(x).
  EXPECT_NEAR(benchmark_eval(BenchmarkKind::Griewank, std::vector<double>{2.0}),
              1.0 + 4.0 / 4000.0 - std::cos(2.0), 1e-14);
  EXPECT_NEAR(benchmark_eval(BenchmarkKind::Alpine, std::vector<double>{-2.0, 3.0}),
              std::abs(-2.0 * std::sin(-2.0) - 0.2) + std::abs(3.0 * std::sin(3.0) + 0.3), 1e-14);
  const double ackley1 = -20.0 * std::exp(-0.2 * std::sqrt(1.0 / 2.0)) -
                         std::exp((std::cos(2 * std::numbers::pi) + 1.0) / 2.0) + 20.0 +
                         std::numbers::e;
  EXPECT_NEAR(benchmark_eval(BenchmarkKind::Ackley, std::vector<double>{1.0, 0.0}), ackley1, 1e-14);
}

TEST(Benchmarks, BoxAndNames) {
  EXPECT_THROW(benchmark_eval(BenchmarkKind::Rastrigin, std::vector<double>{6.0}), InvalidArgument);
  EXPECT_THROW(benchmark_eval(BenchmarkKind::Rastrigin, std::vector<double>{}), InvalidArgument);
  for (auto kind : {BenchmarkKind::Alpine, BenchmarkKind::Ackley, BenchmarkKind::Rastrigin,
                    BenchmarkKind::Griewank, BenchmarkKind::Schwefel})
    EXPECT_EQ(benchmark_from_name(benchmark_name(kind)), kind);
  EXPECT_THROW(benchmark_from_name("sphere"), InvalidArgument);
}

TEST(Problem, ResonantConstantPulseIsPerfect) {
  const Problem p = qubit_problem(0.0);
  EXPECT_NEAR(p.evaluate(Config(28, 1)), 0.0, 1e-12);
  EXPECT_NEAR(p.evaluate(Config(28, 0)), 0.0, 1e-12);
  Config alternating(28);
  for (std::size_t k = 0; k < 28; ++k) alternating[k] = static_cast<int>(k % 2);
  EXPECT_NEAR(p.evaluate(alternating), 1.0, 1e-12);
}

TEST(Problem, DetunedBangBangSolution) {
  // Delta = 1, u0 = 1, T = pi*sqrt(2): +u0 for the first half then -u0 gives
  // two half-turns about tilted axes that land on |1>.
  const TimeGrid g(std::numbers::pi * std::numbers::sqrt2, 28);
  ControlEncoding enc(TimeSeriesBasis{}, {ValueMap::uniform(-1, 1, 3)}, g, Layout::Interleaved);
  const Problem p(StateTransfer{SingleQubit{1.0, 1.0}, CVector::Unit(2, 0), CVector::Unit(2, 1)},
                  std::move(enc));
  Config x(28, 0);
  for (std::size_t k = 0; k < 14; ++k) x[k] = 2;
  EXPECT_NEAR(p.evaluate(x), 0.0, 1e-12);
}

TEST(Problem, PopulationsHaveOneRowPerGridPoint) {
  const Problem p = qubit_problem(0.0);
  const auto rows = p.populations(Config(28, 1));
  ASSERT_EQ(rows.size(), 29u);
  EXPECT_NEAR(rows.front()[0], 1.0, 1e-15);
  EXPECT_NEAR(rows.back()[1], 1.0, 1e-12);
  for (const auto& r : rows) EXPECT_NEAR(r[0] + r[1], 1.0, 1e-12);
}

TEST(Problem, OpenPopulationsIncludeSink) {
  const TimeGrid g(1.0, 30);
  const ValueMap m = ValueMap::uniform(0, 20, 10);
  ControlEncoding enc(SplineBasis{10, 3}, {m, m}, g, Layout::Interleaved);
  const Problem p(OpenTransfer{Stirap{0.0, 5.0}, 0, 2, 40}, std::move(enc));
  Config x{0, 9, 3, 9, 9, 6, 9, 3, 9, 0, 6, 0, 3, 0, 9, 0, 0, 0, 0, 0};
  const auto rows = p.populations(x);
  ASSERT_EQ(rows.size(), 31u);
  for (const auto& r : rows) {
    ASSERT_EQ(r.size(), 4u);
    EXPECT_NEAR(r[0] + r[1] + r[2] + r[3], 1.0, 1e-6);
  }
  EXPECT_NEAR(p.evaluate(x), 1.0 - rows.back()[2], 1e-12);
}

TEST(Problem, BenchmarkCoordinatesUseSymmetricGrid) {
  const Problem p(BenchmarkFunction{BenchmarkKind::Rastrigin, 3, 16}, std::nullopt);
  const auto c = p.coordinates(Config{0, 15, 7});
  EXPECT_DOUBLE_EQ(c[0], -5.12);
  EXPECT_DOUBLE_EQ(c[1], 5.12);
  EXPECT_NEAR(c[2], -5.12 + 7 * 10.24 / 15, 1e-12);
  EXPECT_FALSE(p.is_quantum());
  EXPECT_THROW(p.decode(Config(3, 0)), InvalidArgument);
}

TEST(Problem, ConstructionChecksConsistency) {
  const TimeGrid g(1.0, 4);
  ControlEncoding one_field(TimeSeriesBasis{}, {ValueMap::uniform(-1, 1, 2)}, g,
                            Layout::Interleaved);
  EXPECT_THROW(Problem(GateSynthesis{QutritLadder{}, embedded_not(3)}, one_field), InvalidArgument);
  EXPECT_THROW(Problem(StateTransfer{SingleQubit{}, CVector::Unit(2, 0), CVector::Unit(2, 1)},
                       std::nullopt),
               InvalidArgument);
  EXPECT_THROW(Problem(StateTransfer{SingleQubit{}, 2.0 * CVector::Unit(2, 0), CVector::Unit(2, 1)},
                       one_field),
               InvalidArgument);
}
