#include "tteda/encodings.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tteda/error.hpp"

namespace tteda {

ValueMap::ValueMap(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.size() < 2) throw InvalidArgument("a value map needs at least two levels");
  for (std::size_t m = 0; m < levels_.size(); ++m) {
    if (!std::isfinite(levels_[m])) throw InvalidArgument("value map levels must be finite");
    if (m > 0 && !(levels_[m] > levels_[m - 1]))
      throw InvalidArgument("value map levels must be strictly increasing");
  }
}

ValueMap ValueMap::uniform(double lo, double hi, std::size_t d) {
  if (d < 2) throw InvalidArgument("a value map needs at least two levels");
  if (!(lo < hi)) throw InvalidArgument("value map range must satisfy lo < hi");
  std::vector<double> levels(d);
  const double step = (hi - lo) / static_cast<double>(d - 1);
  for (std::size_t m = 0; m < d; ++m) levels[m] = lo + static_cast<double>(m) * step;
  levels.back() = hi;
  return ValueMap(std::move(levels));
}

double ValueMap::at(int m) const {
  if (m < 0 || static_cast<std::size_t>(m) >= levels_.size())
    throw InvalidArgument("symbol " + std::to_string(m) + " outside value map");
  return levels_[static_cast<std::size_t>(m)];
}

int ValueMap::nearest(double value) const {
  int best = 0;
  double best_dist = std::abs(value - levels_[0]);
  for (std::size_t m = 1; m < levels_.size(); ++m) {
    const double dist = std::abs(value - levels_[m]);
    if (dist < best_dist) {
      best = static_cast<int>(m);
      best_dist = dist;
    }
  }
  return best;
}

TimeGrid::TimeGrid(double duration_, std::size_t n_steps_) : duration(duration_), n_steps(n_steps_) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw InvalidArgument("grid duration must be positive");
  if (n_steps < 1) throw InvalidArgument("grid needs at least one step");
}

std::vector<double> decode_time_series(std::span<const int> x, const ValueMap& map,
                                       const TimeGrid& grid) {
  if (x.size() != grid.n_steps)
    throw InvalidArgument("time series length " + std::to_string(x.size()) +
                          " does not match grid steps " + std::to_string(grid.n_steps));
  std::vector<double> u(grid.n_steps);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = map.at(x[k]);
  return u;
}

std::vector<double> decode_piecewise(std::span<const int> x, const ValueMap& map,
                                     const TimeGrid& grid) {
  const std::size_t segments = x.size();
  if (segments == 0) throw InvalidArgument("piecewise encoding needs at least one segment");
  if (segments > grid.n_steps)
    throw InvalidArgument("more segments than grid steps");
  std::vector<double> u(grid.n_steps);
  for (std::size_t k = 0; k < grid.n_steps; ++k) u[k] = map.at(x[k * segments / grid.n_steps]);
  return u;
}

double fourier_value(std::span<const double> coeffs, double t, double period) {
  if (coeffs.size() % 2 == 0) throw InvalidArgument("Fourier coefficient count must be odd");
  double u = coeffs[0];
  const double w = 2.0 * std::numbers::pi / period;
  for (std::size_t l = 1; 2 * l < coeffs.size() + 1; ++l) {
    const double arg = w * static_cast<double>(l) * t;
    u += coeffs[2 * l - 1] * std::cos(arg) + coeffs[2 * l] * std::sin(arg);
  }
  return u;
}

std::vector<double> decode_fourier(std::span<const int> x, const ValueMap& map,
                                   const TimeGrid& grid) {
  if (x.empty() || x.size() % 2 == 0)
    throw InvalidArgument("Fourier encoding needs 2J+1 coefficients");
  std::vector<double> c(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) c[j] = map.at(x[j]);
  std::vector<double> u(grid.n_steps);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = fourier_value(c, grid.midpoint(k), grid.duration);
  return u;
}

std::vector<double> clamped_uniform_knots(std::size_t n_coeffs, int degree, double duration) {
  if (degree < 0) throw InvalidArgument("spline degree must be non-negative");
  const auto p = static_cast<std::size_t>(degree);
  if (n_coeffs < p + 1) throw InvalidArgument("spline needs at least degree+1 coefficients");
  std::vector<double> knots(n_coeffs + p + 1, 0.0);
  const std::size_t spans = n_coeffs - p;
  for (std::size_t i = 1; i < spans; ++i)
    knots[p + i] = duration * static_cast<double>(i) / static_cast<double>(spans);
  for (std::size_t i = n_coeffs; i < knots.size(); ++i) knots[i] = duration;
  return knots;
}

namespace {

double basis_recursive(std::size_t j, int p, std::span<const double> knots, double t, bool at_end) {
  if (p == 0) {
    if (at_end) return (knots[j] < knots[j + 1] && knots[j + 1] == knots.back()) ? 1.0 : 0.0;
    return (knots[j] <= t && t < knots[j + 1]) ? 1.0 : 0.0;
  }
  const auto pp = static_cast<std::size_t>(p);
  double value = 0.0;
  const double d1 = knots[j + pp] - knots[j];
  if (d1 > 0.0) value += (t - knots[j]) / d1 * basis_recursive(j, p - 1, knots, t, at_end);
  const double d2 = knots[j + pp + 1] - knots[j + 1];
  if (d2 > 0.0)
    value += (knots[j + pp + 1] - t) / d2 * basis_recursive(j + 1, p - 1, knots, t, at_end);
  return value;
}

} // namespace

double bspline_basis(std::size_t j, int degree, std::span<const double> knots, double t) {
  if (degree < 0) throw InvalidArgument("spline degree must be non-negative");
  if (knots.size() < static_cast<std::size_t>(degree) + 2 ||
      j + static_cast<std::size_t>(degree) + 1 >= knots.size())
    throw InvalidArgument("basis index out of range for knot vector");
  if (!(t >= knots.front() && t <= knots.back()))
    throw InvalidArgument("spline evaluation time outside [0, T]");
  return basis_recursive(j, degree, knots, t, t == knots.back());
}

double spline_value(std::span<const double> coeffs, int degree, std::span<const double> knots,
                    double t) {
  double u = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) u += coeffs[j] * bspline_basis(j, degree, knots, t);
  return u;
}

std::vector<double> decode_spline(std::span<const int> x, const ValueMap& map,
                                  const TimeGrid& grid, int degree) {
  const auto knots = clamped_uniform_knots(x.size(), degree, grid.duration);
  std::vector<double> c(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) c[j] = map.at(x[j]);
  std::vector<double> u(grid.n_steps);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = spline_value(c, degree, knots, grid.midpoint(k));
  return u;
}

VariableLayout::VariableLayout(std::size_t field_count, std::size_t coeffs_per_field, Layout layout)
    : fields_(field_count), coeffs_(coeffs_per_field), layout_(layout) {
  if (fields_ == 0) throw InvalidArgument("layout needs at least one field");
  if (coeffs_ == 0) throw InvalidArgument("layout needs at least one coefficient per field");
}

std::size_t VariableLayout::site_of(std::size_t field, std::size_t coeff) const {
  if (field >= fields_ || coeff >= coeffs_) throw InvalidArgument("field or coefficient out of range");
  return layout_ == Layout::Interleaved ? coeff * fields_ + field : field * coeffs_ + coeff;
}

std::pair<std::size_t, std::size_t> VariableLayout::field_coeff_of(std::size_t site) const {
  if (site >= site_count()) throw InvalidArgument("site out of range");
  if (layout_ == Layout::Interleaved) return {site % fields_, site / fields_};
  return {site / coeffs_, site % coeffs_};
}

std::vector<std::pair<std::size_t, std::size_t>> VariableLayout::ordering() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(site_count());
  for (std::size_t s = 0; s < site_count(); ++s) out.push_back(field_coeff_of(s));
  return out;
}

std::size_t coefficients_per_field(const Basis& basis, const TimeGrid& grid) {
  struct Visitor {
    const TimeGrid& grid;
    std::size_t operator()(const TimeSeriesBasis&) const { return grid.n_steps; }
    std::size_t operator()(const PiecewiseBasis& b) const { return b.segments; }
    std::size_t operator()(const FourierBasis& b) const { return 2 * b.harmonics + 1; }
    std::size_t operator()(const SplineBasis& b) const { return b.coefficients; }
  };
  return std::visit(Visitor{grid}, basis);
}

ControlEncoding::ControlEncoding(Basis basis, std::vector<ValueMap> field_maps, TimeGrid grid,
                                 Layout layout)
    : basis_(std::move(basis)),
      maps_(std::move(field_maps)),
      grid_(grid),
      layout_(maps_.empty() ? 1 : maps_.size(), coefficients_per_field(basis_, grid_), layout) {
  if (maps_.empty()) throw InvalidArgument("encoding needs at least one field");
  if (const auto* pw = std::get_if<PiecewiseBasis>(&basis_);
      pw && (pw->segments == 0 || pw->segments > grid_.n_steps))
    throw InvalidArgument("piecewise segments must lie in [1, n_steps]");
  if (const auto* sp = std::get_if<SplineBasis>(&basis_))
    clamped_uniform_knots(sp->coefficients, sp->degree, grid_.duration);
}

std::vector<std::size_t> ControlEncoding::local_dims() const {
  std::vector<std::size_t> dims(site_count());
  for (std::size_t s = 0; s < dims.size(); ++s) dims[s] = maps_[layout_.field_coeff_of(s).first].size();
  return dims;
}

std::vector<int> ControlEncoding::field_symbols(std::span<const int> x, std::size_t field) const {
  if (x.size() != site_count())
    throw InvalidArgument("configuration length " + std::to_string(x.size()) +
                          " does not match encoding size " + std::to_string(site_count()));
  const std::size_t n = coefficients_per_field(basis_, grid_);
  std::vector<int> out(n);
  for (std::size_t c = 0; c < n; ++c) out[c] = x[layout_.site_of(field, c)];
  return out;
}

std::vector<double> ControlEncoding::field_coefficients(std::span<const int> x,
                                                        std::size_t field) const {
  const auto symbols = field_symbols(x, field);
  std::vector<double> out(symbols.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = maps_[field].at(symbols[c]);
  return out;
}

ControlFields ControlEncoding::decode(std::span<const int> x) const {
  ControlFields fields{grid_, {}};
  fields.samples.reserve(maps_.size());
  for (std::size_t f = 0; f < maps_.size(); ++f) {
    const auto symbols = field_symbols(x, f);
    const ValueMap& map = maps_[f];
    fields.samples.push_back(std::visit(
        [&](const auto& b) -> std::vector<double> {
          using B = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<B, TimeSeriesBasis>)
            return decode_time_series(symbols, map, grid_);
          else if constexpr (std::is_same_v<B, PiecewiseBasis>)
            return decode_piecewise(symbols, map, grid_);
          else if constexpr (std::is_same_v<B, FourierBasis>)
            return decode_fourier(symbols, map, grid_);
          else
            return decode_spline(symbols, map, grid_, b.degree);
        },
        basis_));
  }
  return fields;
}

} // namespace tteda
