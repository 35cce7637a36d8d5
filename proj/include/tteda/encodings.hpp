#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace tteda {

/// Map from symbols 0..d-1 to strictly increasing physical values.
class ValueMap {
public:
  explicit ValueMap(std::vector<double> levels);
  /// d evenly spaced levels from lo to hi inclusive.
  static ValueMap uniform(double lo, double hi, std::size_t d);

  std::size_t size() const { return levels_.size(); }
  double operator[](std::size_t m) const { return levels_[m]; }
  double at(int m) const;
  const std::vector<double>& levels() const { return levels_; }
  double min() const { return levels_.front(); }
  double max() const { return levels_.back(); }
  /// Symbol whose level is closest to `value` (lower symbol on ties).
  int nearest(double value) const;

private:
  std::vector<double> levels_;
};

/// Uniform grid of n_steps steps over [0, T]. Fields are held constant over
/// each step and sampled at the step midpoint.
struct TimeGrid {
  double duration = 1.0;
  std::size_t n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double duration, std::size_t n_steps);
  double dt() const { return duration / static_cast<double>(n_steps); }
  double start(std::size_t k) const { return static_cast<double>(k) * dt(); }
  double midpoint(std::size_t k) const { return (static_cast<double>(k) + 0.5) * dt(); }
};

/// Control fields sampled on a grid: samples[field][step].
struct ControlFields {
  TimeGrid grid;
  std::vector<std::vector<double>> samples;

  std::size_t field_count() const { return samples.size(); }
};

// Single-field decoders. Symbols are 0-based.

std::vector<double> decode_time_series(std::span<const int> x, const ValueMap& map,
                                       const TimeGrid& grid);
/// Segment of step k is floor(k * J / n_steps).
std::vector<double> decode_piecewise(std::span<const int> x, const ValueMap& map,
                                     const TimeGrid& grid);
/// x = (c0, c1_cos, c1_sin, ..., cJ_cos, cJ_sin); basis period is T.
std::vector<double> decode_fourier(std::span<const int> x, const ValueMap& map,
                                   const TimeGrid& grid);
std::vector<double> decode_spline(std::span<const int> x, const ValueMap& map,
                                  const TimeGrid& grid, int degree);

/// Truncated Fourier series with coefficients in the decode_fourier order.
double fourier_value(std::span<const double> coeffs, double t, double period);

/// Clamped uniform knot vector on [0, T]: J + p + 1 knots, ends repeated p + 1 times.
std::vector<double> clamped_uniform_knots(std::size_t n_coeffs, int degree, double duration);
/// Cox-de Boor B_{j,p}(t). At t = T the last non-empty span is treated as
/// closed so the basis sums to one on all of [0, T].
double bspline_basis(std::size_t j, int degree, std::span<const double> knots, double t);
double spline_value(std::span<const double> coeffs, int degree, std::span<const double> knots,
                    double t);

enum class Layout { Interleaved, Separate };

/// Bijection between TT sites and (field, coefficient) pairs.
class VariableLayout {
public:
  VariableLayout(std::size_t field_count, std::size_t coeffs_per_field, Layout layout);

  std::size_t site_count() const { return fields_ * coeffs_; }
  std::size_t site_of(std::size_t field, std::size_t coeff) const;
  std::pair<std::size_t, std::size_t> field_coeff_of(std::size_t site) const;
  /// Per-site (field, coeff) in site order.
  std::vector<std::pair<std::size_t, std::size_t>> ordering() const;
  Layout kind() const { return layout_; }

private:
  std::size_t fields_;
  std::size_t coeffs_;
  Layout layout_;
};

struct TimeSeriesBasis {};
struct PiecewiseBasis {
  std::size_t segments;
};
struct FourierBasis {
  std::size_t harmonics;
};
struct SplineBasis {
  std::size_t coefficients;
  int degree = 3;
};
using Basis = std::variant<TimeSeriesBasis, PiecewiseBasis, FourierBasis, SplineBasis>;

/// Coefficients per field implied by a basis on a grid.
std::size_t coefficients_per_field(const Basis& basis, const TimeGrid& grid);

/// Decodes a full TT configuration into per-field control samples.
class ControlEncoding {
public:
  ControlEncoding(Basis basis, std::vector<ValueMap> field_maps, TimeGrid grid, Layout layout);

  std::size_t field_count() const { return maps_.size(); }
  std::size_t site_count() const { return layout_.site_count(); }
  std::vector<std::size_t> local_dims() const;
  const Basis& basis() const { return basis_; }
  const TimeGrid& grid() const { return grid_; }
  const VariableLayout& layout() const { return layout_; }
  const ValueMap& value_map(std::size_t field) const { return maps_[field]; }

  /// Symbols of one field, in coefficient order.
  std::vector<int> field_symbols(std::span<const int> x, std::size_t field) const;
  /// Physical coefficient values of one field.
  std::vector<double> field_coefficients(std::span<const int> x, std::size_t field) const;
  ControlFields decode(std::span<const int> x) const;

private:
  Basis basis_;
  std::vector<ValueMap> maps_;
  TimeGrid grid_;
  VariableLayout layout_;
};

} // namespace tteda
