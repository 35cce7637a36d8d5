#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <variant>

#include <Eigen/Dense>

#include "tteda/encodings.hpp"

namespace tteda {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// H = (detuning/2) sz + (u/2) sx with |u| <= u0. One field: u.
struct SingleQubit {
  double detuning = 0.0;
  double u0 = 1.0;
};

/// Effective triplet-manifold Bell model in the basis
/// {|dd>, |du>_+, |uu>}. Fields: Rabi frequency, detuning.
struct BellTriplet {
  double xi = 1.0;
};

/// Three-level ladder driven on both transitions. Fields: c_x, c_y.
struct QutritLadder {
  double anharmonicity = -1.0;
};

/// Lambda system {g, e, r} plus sink s; e decays into s at rate gamma.
/// Fields: pump, Stokes.
struct Stirap {
  double pump_detuning = 0.0;
  double gamma = 5.0;
};

using DynamicsModel = std::variant<SingleQubit, BellTriplet, QutritLadder, Stirap>;

std::size_t dimension(const DynamicsModel& model);
std::size_t field_count(const DynamicsModel& model);
/// Hamiltonian for one set of instantaneous field values.
CMatrix hamiltonian(const DynamicsModel& model, std::span<const double> field_values);

CMatrix h_single_qubit(double u, double detuning);
CMatrix h_bell_effective(double rabi, double detuning, double xi);
CMatrix h_qutrit(double cx, double cy, double anharmonicity);
/// 4x4 in the order {g, e, r, s}; the sink row and column are zero.
CMatrix h_stirap(double pump, double stokes, double pump_detuning);

/// exp(-i H dt) via Hermitian eigendecomposition.
CMatrix step_propagator(const CMatrix& h, double dt);

struct ClosedEvolution {
  CVector state;
  CMatrix propagator;
};

/// Called with (step, state) for step = 0..n_steps; step 0 is the initial state.
using StateObserver = std::function<void(std::size_t, const CVector&)>;
using DensityObserver = std::function<void(std::size_t, const CMatrix&)>;

/// Piecewise-constant Schrodinger propagation U(T) = U_{n-1} ... U_0.
/// Throws InvalidArgument on non-finite fields or mismatched sizes.
ClosedEvolution propagate_schrodinger(const DynamicsModel& model, const ControlFields& fields,
                                      const CVector& psi0, const StateObserver& observer = {});

/// Right-hand side of the master equation with jump operator |s><e|.
CMatrix lindblad_rhs(const CMatrix& h, double gamma, const CMatrix& rho);

/// Fixed-step RK4 integration of the STIRAP master equation with `substeps`
/// steps per grid step. Throws IntegrationAccuracy on trace drift above 1e-6
/// or eigenvalues below -1e-8.
CMatrix propagate_lindblad(const Stirap& model, const ControlFields& fields, const CMatrix& rho0,
                           std::size_t substeps = 10, const DensityObserver& observer = {});

} // namespace tteda
