#include "tteda/dynamics.hpp"

#include <cmath>
#include <string>

#include "tteda/error.hpp"

namespace tteda {

using namespace std::complex_literals;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace

std::size_t dimension(const DynamicsModel& model) {
  return std::visit(Overloaded{[](const SingleQubit&) -> std::size_t { return 2; },
                               [](const BellTriplet&) -> std::size_t { return 3; },
                               [](const QutritLadder&) -> std::size_t { return 3; },
                               [](const Stirap&) -> std::size_t { return 4; }},
                    model);
}

std::size_t field_count(const DynamicsModel& model) {
  return std::holds_alternative<SingleQubit>(model) ? 1 : 2;
}

CMatrix h_single_qubit(double u, double detuning) {
  CMatrix h(2, 2);
  h << detuning / 2.0, u / 2.0, u / 2.0, -detuning / 2.0;
  return h;
}

CMatrix h_bell_effective(double rabi, double detuning, double xi) {
  const double c = rabi / std::sqrt(2.0);
  CMatrix h(3, 3);
  h << detuning, c, 0.0, c, 0.0, c, 0.0, c, 4.0 * xi - detuning;
  return h;
}

CMatrix h_qutrit(double cx, double cy, double anharmonicity) {
  // sigma^x_{n-1,n} = |n-1><n| + |n><n-1|, sigma^y_{n-1,n} = i(|n><n-1| - |n-1><n|)
  CMatrix h = CMatrix::Zero(3, 3);
  h(2, 2) = anharmonicity;
  for (int n = 1; n <= 2; ++n) {
    const double g = std::sqrt(static_cast<double>(n)) / 2.0;
    h(n - 1, n) += g * (cx - 1i * cy);
    h(n, n - 1) += g * (cx + 1i * cy);
  }
  return h;
}

CMatrix h_stirap(double pump, double stokes, double pump_detuning) {
  CMatrix h = CMatrix::Zero(4, 4);
  h(1, 1) = pump_detuning;
  h(0, 1) = h(1, 0) = pump / 2.0;
  h(1, 2) = h(2, 1) = stokes / 2.0;
  return h;
}

CMatrix hamiltonian(const DynamicsModel& model, std::span<const double> v) {
  if (v.size() != field_count(model))
    throw InvalidArgument("expected " + std::to_string(field_count(model)) + " field values");
  return std::visit(
      Overloaded{[&](const SingleQubit& m) { return h_single_qubit(v[0], m.detuning); },
                 [&](const BellTriplet& m) { return h_bell_effective(v[0], v[1], m.xi); },
                 [&](const QutritLadder& m) { return h_qutrit(v[0], v[1], m.anharmonicity); },
                 [&](const Stirap& m) { return h_stirap(v[0], v[1], m.pump_detuning); }},
      model);
}

CMatrix step_propagator(const CMatrix& h, double dt) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  if (eig.info() != Eigen::Success) throw DegenerateModel("eigendecomposition failed");
  const auto& vecs = eig.eigenvectors();
  const auto& vals = eig.eigenvalues();
  CVector phases(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) phases(i) = std::exp(-1i * vals(i) * dt);
  return vecs * phases.asDiagonal() * vecs.adjoint();
}

namespace {

void check_fields(const DynamicsModel& model, const ControlFields& fields) {
  if (fields.field_count() != field_count(model))
    throw InvalidArgument("model expects " + std::to_string(field_count(model)) +
                          " fields, got " + std::to_string(fields.field_count()));
  for (const auto& f : fields.samples) {
    if (f.size() != fields.grid.n_steps) throw InvalidArgument("field length does not match grid");
    for (double v : f)
      if (!std::isfinite(v)) throw InvalidArgument("non-finite control field value");
  }
}

} // namespace

ClosedEvolution propagate_schrodinger(const DynamicsModel& model, const ControlFields& fields,
                                      const CVector& psi0, const StateObserver& observer) {
  check_fields(model, fields);
  const auto n = static_cast<Eigen::Index>(dimension(model));
  if (psi0.size() != n) throw InvalidArgument("initial state has the wrong dimension");

  const std::size_t n_fields = fields.field_count();
  const double dt = fields.grid.dt();
  CMatrix total = CMatrix::Identity(n, n);
  CMatrix step;
  std::vector<double> values(n_fields), previous;
  CVector psi = psi0;
  if (observer) observer(0, psi);
  for (std::size_t k = 0; k < fields.grid.n_steps; ++k) {
    for (std::size_t f = 0; f < n_fields; ++f) values[f] = fields.samples[f][k];
    // Piecewise-constant encodings repeat values across many steps.
    if (values != previous) {
      step = step_propagator(hamiltonian(model, values), dt);
      previous = values;
    }
    total = step * total;
    if (observer) {
      psi = step * psi;
      observer(k + 1, psi);
    }
  }
  return {total * psi0, total};
}

namespace {

using Mat4 = Eigen::Matrix4cd;

// Fixed-size twin of lindblad_rhs for the integrator's inner loop.
Mat4 lindblad_rhs4(const Mat4& h, double gamma, const Mat4& rho) {
  Mat4 out = -1i * (h * rho - rho * h);
  if (gamma != 0.0) {
    const double g2 = gamma / 2.0;
    out(3, 3) += gamma * rho(1, 1);
    out.row(1) -= g2 * rho.row(1);
    out.col(1) -= g2 * rho.col(1);
  }
  return out;
}

} // namespace

CMatrix lindblad_rhs(const CMatrix& h, double gamma, const CMatrix& rho) {
  CMatrix out = -1i * (h * rho - rho * h);
  if (gamma != 0.0) {
    // L = |s><e|: L rho L^dag = rho_ee |s><s|, L^dag L = |e><e|.
    const double g2 = gamma / 2.0;
    out(3, 3) += gamma * rho(1, 1);
    out.row(1) -= g2 * rho.row(1);
    out.col(1) -= g2 * rho.col(1);
  }
  return out;
}

CMatrix propagate_lindblad(const Stirap& model, const ControlFields& fields, const CMatrix& rho0,
                           std::size_t substeps, const DensityObserver& observer) {
  check_fields(model, fields);
  if (model.gamma < 0.0) throw InvalidArgument("decay rate must be non-negative");
  if (substeps < 1) throw InvalidArgument("substeps must be at least 1");
  if (rho0.rows() != 4 || rho0.cols() != 4)
    throw InvalidArgument("density matrix must be 4x4 over {g, e, r, s}");

  const double h = fields.grid.dt() / static_cast<double>(substeps);
  const std::complex<double> trace0 = rho0.trace();
  Mat4 rho = rho0;
  if (observer) observer(0, CMatrix(rho));
  for (std::size_t k = 0; k < fields.grid.n_steps; ++k) {
    const Mat4 ham = h_stirap(fields.samples[0][k], fields.samples[1][k], model.pump_detuning);
    for (std::size_t s = 0; s < substeps; ++s) {
      const Mat4 k1 = lindblad_rhs4(ham, model.gamma, rho);
      const Mat4 k2 = lindblad_rhs4(ham, model.gamma, rho + (h / 2.0) * k1);
      const Mat4 k3 = lindblad_rhs4(ham, model.gamma, rho + (h / 2.0) * k2);
      const Mat4 k4 = lindblad_rhs4(ham, model.gamma, rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (observer) observer(k + 1, CMatrix(rho));
  }

  const double drift = std::abs(rho.trace() - trace0);
  if (!(drift <= 1e-6))
    throw IntegrationAccuracy("trace drifted by " + std::to_string(drift) +
                              "; increase the substep count");
  const Mat4 herm = (rho + rho.adjoint()) / 2.0;
  const double min_eig = Eigen::SelfAdjointEigenSolver<Mat4>(herm, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
  if (min_eig < -1e-8)
    throw IntegrationAccuracy("density matrix lost positivity (eigenvalue " +
                              std::to_string(min_eig) + "); increase the substep count");
  return CMatrix(rho);
}

} // namespace tteda
