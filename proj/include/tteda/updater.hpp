#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tteda/sampler.hpp"
#include "tteda/tensor_train.hpp"

namespace tteda {

/// The M lowest-objective configs of a batch, ascending by value.
struct EliteSet {
  std::vector<Config> configs;
  std::vector<double> values;
  /// Position of each elite in the source batch.
  std::vector<std::size_t> source_indices;

  std::size_t size() const { return configs.size(); }
};

struct UpdateConfig {
  double eta = 0.05;
  std::size_t sweeps = 10;
  /// Frobenius-norm cap on each site gradient; nullopt disables clipping.
  std::optional<double> clip_norm = 10.0;
  /// Weight of the -log Z term: 0 is pure elite log-score ascent,
  /// 1 is elite log-likelihood ascent.
  double lambda = 0.0;
  /// Follow every left-to-right pass with a right-to-left pass.
  bool bidirectional = false;
};

struct SweepReport {
  /// Elite terms skipped because their score was zero at update time.
  std::size_t dropped_elites = 0;
};

/// Stable selection: ties keep batch order. Throws InvalidArgument if M is 0 or
/// exceeds the batch size, or if any objective value is NaN.
EliteSet select_elites(const SampleBatch& batch, std::size_t count);

/// Gradient of sum_i w_i log S(x_i) with respect to core k. Throws
/// DegenerateElite if a config with nonzero weight has zero score.
Core logscore_gradient(const TensorTrain& tt, std::span<const Config> configs,
                       std::span<const double> weights, std::size_t k);

/// Gradient of the mean elite log-score with respect to core k.
Core elite_logscore_gradient(const TensorTrain& tt, const EliteSet& elites, std::size_t k);

/// Exact gradient of log Z with respect to core k, by contraction.
Core logz_gradient(const TensorTrain& tt, std::size_t k);

/// Unclipped ascent direction at site k: elite gradient - lambda * grad log Z.
Core update_direction(const TensorTrain& tt, const EliteSet& elites, std::size_t k,
                      double lambda);

/// Rescales `gradient` in place to Frobenius norm `clip_norm` if it exceeds it.
void clip(Core& gradient, std::optional<double> clip_norm);

/// Single-site gradient-ascent sweeps on the elite objective. Each site update
/// is clipped, clamped at zero, and followed by per-core Frobenius
/// renormalization.
TensorTrain sweep_update(TensorTrain tt, const EliteSet& elites, const UpdateConfig& cfg,
                         SweepReport* report = nullptr);

} // namespace tteda
