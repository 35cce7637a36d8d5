#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tteda/dynamics.hpp"
#include "tteda/encodings.hpp"

namespace tteda {

/// 1 - |<target|psi>|^2
double state_infidelity(const CVector& psi, const CVector& target);

/// Six-axis-state average gate infidelity on the qubit subspace spanned by
/// levels 0 and 1: 1 - (1/6) sum_j |<j| U_t^dag U |j>|^2.
double gate_infidelity(const CMatrix& u, const CMatrix& u_target);

/// 1 - <target| rho |target> for a basis-state target.
double open_infidelity(const CMatrix& rho, std::size_t target_level);

enum class BenchmarkKind { Alpine, Ackley, Rastrigin, Griewank, Schwefel };

BenchmarkKind benchmark_from_name(std::string_view name);
std::string_view benchmark_name(BenchmarkKind kind);
/// Symmetric coordinate box [-bound, bound].
double benchmark_bound(BenchmarkKind kind);
double benchmark_eval(BenchmarkKind kind, std::span<const double> v);

struct StateTransfer {
  DynamicsModel model;
  CVector initial;
  CVector target;
};

struct GateSynthesis {
  DynamicsModel model;
  /// Full n x n target; only its action on levels 0 and 1 enters the measure.
  CMatrix target;
};

struct OpenTransfer {
  Stirap model;
  std::size_t initial_level = 0;
  std::size_t target_level = 2;
  std::size_t substeps = 40;
};

struct BenchmarkFunction {
  BenchmarkKind kind;
  std::size_t dimension;
  std::size_t levels = 16;
};

using ObjectiveSpec = std::variant<StateTransfer, GateSynthesis, OpenTransfer, BenchmarkFunction>;

/// NOT on levels {0, 1}, identity on the remaining levels.
CMatrix embedded_not(std::size_t dim);

/// An objective plus the encoding that turns TT configurations into its
/// inputs. Quantum objectives require an encoding whose field count matches
/// the model; benchmark functions use an internal uniform value map over
/// their box.
class Problem {
public:
  Problem(ObjectiveSpec objective, std::optional<ControlEncoding> encoding);

  const ObjectiveSpec& objective() const { return objective_; }
  const std::optional<ControlEncoding>& encoding() const { return encoding_; }
  bool is_quantum() const { return !std::holds_alternative<BenchmarkFunction>(objective_); }

  std::vector<std::size_t> local_dims() const;
  /// One call is one unit of evaluation budget. Quantum objectives are
  /// checked to lie in [0, 1].
  double evaluate(std::span<const int> x) const;

  /// Decoded control fields (quantum problems only).
  ControlFields decode(std::span<const int> x) const;
  /// Benchmark coordinates for a configuration (benchmark problems only).
  std::vector<double> coordinates(std::span<const int> x) const;
  /// Populations at every grid point t_0 = 0 .. t_n = T: rows are times.
  /// Open systems include the sink as the last column.
  std::vector<std::vector<double>> populations(std::span<const int> x) const;

private:
  ObjectiveSpec objective_;
  std::optional<ControlEncoding> encoding_;
  std::optional<ValueMap> benchmark_map_;
};

/// Wraps a raw objective value, clamping round-off and rejecting values
/// outside [0, 1] by more than 1e-9.
double checked_unit_interval(double value);

} // namespace tteda
