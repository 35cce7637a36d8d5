#include "tteda/updater.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tteda/error.hpp"

namespace tteda {

EliteSet select_elites(const SampleBatch& batch, std::size_t count) {
  if (count == 0) throw InvalidArgument("elite count must be at least 1");
  if (count > batch.size())
    throw InvalidArgument("elite count " + std::to_string(count) + " exceeds batch size " +
                          std::to_string(batch.size()));
  if (batch.objective_values.size() != batch.size())
    throw InvalidArgument("batch objective values are not filled");
  for (double v : batch.objective_values)
    if (std::isnan(v)) throw InvalidArgument("batch objective values are not filled");

  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return batch.objective_values[a] < batch.objective_values[b];
  });
  EliteSet elites;
  for (std::size_t i = 0; i < count; ++i) {
    elites.configs.push_back(batch.configs[order[i]]);
    elites.values.push_back(batch.objective_values[order[i]]);
    elites.source_indices.push_back(order[i]);
  }
  return elites;
}

namespace {

Core zeros_like(const Core& c) { return Core(c.left(), c.phys(), c.right(), 0.0); }

// Adds weight * (left ⊗ e_m ⊗ right) / score into grad.
void add_outer(Core& grad, std::span<const double> left, int m, std::span<const double> right,
               double factor) {
  for (std::size_t a = 0; a < grad.left(); ++a) {
    const double la = left[a] * factor;
    if (la == 0.0) continue;
    for (std::size_t b = 0; b < grad.right(); ++b) grad(a, m, b) += la * right[b];
  }
}

double bilinear(std::span<const double> left, const Core& c, int m, std::span<const double> right) {
  double s = 0.0;
  for (std::size_t a = 0; a < c.left(); ++a) {
    double t = 0.0;
    for (std::size_t b = 0; b < c.right(); ++b) t += c(a, m, b) * right[b];
    s += left[a] * t;
  }
  return s;
}

// left * (sum_m A(:, m, :)) * right
double summed_bilinear(std::span<const double> left, const Core& c, std::span<const double> right) {
  double s = 0.0;
  for (std::size_t a = 0; a < c.left(); ++a)
    for (std::size_t m = 0; m < c.phys(); ++m)
      for (std::size_t b = 0; b < c.right(); ++b) s += left[a] * c(a, m, b) * right[b];
  return s;
}

} // namespace

Core logscore_gradient(const TensorTrain& tt, std::span<const Config> configs,
                       std::span<const double> weights, std::size_t k) {
  if (configs.size() != weights.size())
    throw InvalidArgument("configs and weights differ in length");
  if (k >= tt.length()) throw InvalidArgument("site index out of range");
  Core grad = zeros_like(tt.core(k));
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (weights[i] == 0.0) continue;
    tt.check_config(configs[i]);
    const auto left = projected_left(tt, configs[i], k);
    const auto right = projected_right(tt, configs[i], k);
    const double s = bilinear(left, tt.core(k), configs[i][k], right);
    if (!(s > 0.0) || !std::isfinite(s))
      throw DegenerateElite("configuration " + std::to_string(i) + " has zero score");
    add_outer(grad, left, configs[i][k], right, weights[i] / s);
  }
  return grad;
}

Core elite_logscore_gradient(const TensorTrain& tt, const EliteSet& elites, std::size_t k) {
  if (elites.size() == 0) throw InvalidArgument("elite set is empty");
  const std::vector<double> w(elites.size(), 1.0 / static_cast<double>(elites.size()));
  return logscore_gradient(tt, elites.configs, w, k);
}

Core logz_gradient(const TensorTrain& tt, std::size_t k) {
  if (k >= tt.length()) throw InvalidArgument("site index out of range");
  const double z = tt.partition();
  const EnvironmentCache env = tt.environments();
  Core grad = zeros_like(tt.core(k));
  for (std::size_t m = 0; m < grad.phys(); ++m)
    add_outer(grad, env.left[k], static_cast<int>(m), env.right[k], 1.0 / z);
  return grad;
}

Core update_direction(const TensorTrain& tt, const EliteSet& elites, std::size_t k,
                      double lambda) {
  Core dir = elite_logscore_gradient(tt, elites, k);
  if (lambda != 0.0) {
    const Core gz = logz_gradient(tt, k);
    auto d = dir.data();
    auto g = gz.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= lambda * g[i];
  }
  return dir;
}

void clip(Core& gradient, std::optional<double> clip_norm) {
  if (!clip_norm) return;
  const double norm = gradient.frobenius_norm();
  if (norm > *clip_norm && norm > 0.0) {
    const double scale = *clip_norm / norm;
    for (double& v : gradient.data()) v *= scale;
  }
}

namespace {

// One directional pass. `forward` sweeps sites 0..L-1 with running left
// environments and cached right environments; backward mirrors it.
void sweep_pass(TensorTrain& tt, const EliteSet& elites, const UpdateConfig& cfg, bool forward,
                SweepReport& report) {
  const std::size_t n = tt.length();
  const std::size_t m_count = elites.size();

  // cached[i][k]: projected environment of elite i on the side not yet visited.
  std::vector<std::vector<std::vector<double>>> cached(m_count);
  std::vector<std::vector<double>> running(m_count, std::vector<double>{1.0});
  std::vector<double> scratch;
  for (std::size_t i = 0; i < m_count; ++i) {
    const Config& x = elites.configs[i];
    auto& env = cached[i];
    env.resize(n);
    if (forward) {
      env[n - 1] = {1.0};
      for (std::size_t k = n - 1; k > 0; --k) absorb_right(tt.core(k), x[k], env[k], env[k - 1]);
    } else {
      env[0] = {1.0};
      for (std::size_t k = 0; k + 1 < n; ++k) absorb_left(env[k], tt.core(k), x[k], env[k + 1]);
    }
  }

  const bool with_logz = cfg.lambda != 0.0;
  EnvironmentCache summed;
  std::vector<double> summed_running{1.0};
  if (with_logz) summed = tt.environments();

  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t k = forward ? step : n - 1 - step;
    Core& core = tt.core(k);
    Core grad = zeros_like(core);

    std::size_t valid = 0;
    for (std::size_t i = 0; i < m_count; ++i) {
      const int xk = elites.configs[i][k];
      const auto& left = forward ? running[i] : cached[i][k];
      const auto& right = forward ? cached[i][k] : running[i];
      const double s = bilinear(left, core, xk, right);
      if (!(s > 0.0) || !std::isfinite(s)) {
        ++report.dropped_elites;
        continue;
      }
      add_outer(grad, left, xk, right, 1.0 / s);
      ++valid;
    }
    if (valid > 0)
      for (double& v : grad.data()) v /= static_cast<double>(valid);

    if (with_logz) {
      const auto& left = forward ? summed_running : summed.left[k];
      const auto& right = forward ? summed.right[k] : summed_running;
      const double z = summed_bilinear(left, core, right);
      if (!(z > 0.0) || !std::isfinite(z))
        throw DegenerateModel("partition function vanished during sweep");
      for (std::size_t m = 0; m < core.phys(); ++m)
        add_outer(grad, left, static_cast<int>(m), right, -cfg.lambda / z);
    }

    clip(grad, cfg.clip_norm);
    auto a = core.data();
    auto g = grad.data();
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = std::max(0.0, a[j] + cfg.eta * g[j]);
    const double norm = core.frobenius_norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw DegenerateModel("core " + std::to_string(k) + " vanished during update");
    for (double& v : a) v /= norm;

    for (std::size_t i = 0; i < m_count; ++i) {
      const int xk = elites.configs[i][k];
      if (forward)
        absorb_left(running[i], core, xk, scratch);
      else
        absorb_right(core, xk, running[i], scratch);
      running[i].swap(scratch);
    }
    if (with_logz) {
      std::vector<double> next(forward ? core.right() : core.left(), 0.0);
      for (std::size_t a0 = 0; a0 < core.left(); ++a0)
        for (std::size_t m = 0; m < core.phys(); ++m)
          for (std::size_t b = 0; b < core.right(); ++b) {
            if (forward)
              next[b] += summed_running[a0] * core(a0, m, b);
            else
              next[a0] += core(a0, m, b) * summed_running[b];
          }
      summed_running = std::move(next);
    }
  }
}

} // namespace

TensorTrain sweep_update(TensorTrain tt, const EliteSet& elites, const UpdateConfig& cfg,
                         SweepReport* report) {
  if (!(cfg.eta > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (cfg.sweeps < 1) throw InvalidArgument("sweep count must be at least 1");
  if (cfg.clip_norm && !(*cfg.clip_norm > 0.0))
    throw InvalidArgument("clip norm must be positive");
  if (elites.size() == 0) throw InvalidArgument("elite set is empty");
  for (const Config& x : elites.configs) tt.check_config(x);

  SweepReport local;
  tt.renormalize();
  for (std::size_t s = 0; s < cfg.sweeps; ++s) {
    sweep_pass(tt, elites, cfg, true, local);
    if (cfg.bidirectional) sweep_pass(tt, elites, cfg, false, local);
  }
  if (report) *report = local;
  return tt;
}

} // namespace tteda
