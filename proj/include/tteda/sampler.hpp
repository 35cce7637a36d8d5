#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tteda/random.hpp"
#include "tteda/tensor_train.hpp"

namespace tteda {

/// K candidate configurations with their model scores and, once evaluated,
/// objective values.
struct SampleBatch {
  std::vector<Config> configs;
  std::vector<double> scores;
  std::vector<double> objective_values;
  /// Sites selected for uniform redraw per config (includes redraws that hit
  /// the original symbol).
  std::vector<std::size_t> mutation_counts;

  std::size_t size() const { return configs.size(); }
};

struct MutationPolicy {
  double epsilon = 0.02;
};

/// Unnormalized conditional weights at site k: entry m is
/// left_env * A_k(m) * env.right[k].
std::vector<double> conditional_weights(const TensorTrain& tt, std::span<const double> left_env,
                                        std::size_t k, const EnvironmentCache& env);

/// Draws one configuration by sequential conditional sampling.
Config sample_one(const TensorTrain& tt, const EnvironmentCache& env, Rng& rng);

/// Draws K independent configurations. Throws DegenerateModel if any
/// conditional weight vector is all zero.
SampleBatch sample(const TensorTrain& tt, Rng& rng, std::size_t count);

/// Redraws each site uniformly with probability epsilon and rescores mutated
/// configs against `tt`.
SampleBatch mutate(SampleBatch batch, const MutationPolicy& policy, Rng& rng,
                   const TensorTrain& tt);

} // namespace tteda
