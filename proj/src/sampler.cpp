#include "tteda/sampler.hpp"

#include <cmath>
#include <string>

#include "tteda/error.hpp"

namespace tteda {

std::vector<double> conditional_weights(const TensorTrain& tt, std::span<const double> left_env,
                                        std::size_t k, const EnvironmentCache& env) {
  const Core& c = tt.core(k);
  const std::vector<double>& right = env.right[k];
  if (left_env.size() != c.left()) throw InvalidArgument("left environment has the wrong size");
  std::vector<double> w(c.phys(), 0.0);
  for (std::size_t a = 0; a < c.left(); ++a) {
    const double la = left_env[a];
    if (la == 0.0) continue;
    for (std::size_t m = 0; m < c.phys(); ++m) {
      double s = 0.0;
      for (std::size_t b = 0; b < c.right(); ++b) s += c(a, m, b) * right[b];
      w[m] += la * s;
    }
  }
  return w;
}

namespace {

int draw_categorical(std::span<const double> weights, std::size_t site, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total))
    throw DegenerateModel("all conditional weights vanish at site " + std::to_string(site));
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (weights[m] <= 0.0) continue;
    acc += weights[m];
    last_positive = static_cast<int>(m);
    if (u < acc) return last_positive;
  }
  return last_positive;
}

} // namespace

Config sample_one(const TensorTrain& tt, const EnvironmentCache& env, Rng& rng) {
  const std::size_t n = tt.length();
  Config x(n);
  std::vector<double> left{1.0}, next;
  for (std::size_t k = 0; k < n; ++k) {
    const auto w = conditional_weights(tt, left, k, env);
    x[k] = draw_categorical(w, k, rng);
    absorb_left(left, tt.core(k), x[k], next);
    left.swap(next);
  }
  return x;
}

SampleBatch sample(const TensorTrain& tt, Rng& rng, std::size_t count) {
  if (count == 0) throw InvalidArgument("batch size must be at least 1");
  const EnvironmentCache env = tt.environments();
  SampleBatch batch;
  batch.configs.reserve(count);
  batch.scores.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    batch.configs.push_back(sample_one(tt, env, rng));
    batch.scores.push_back(tt.score(batch.configs.back()));
  }
  batch.objective_values.assign(count, std::nan(""));
  batch.mutation_counts.assign(count, 0);
  return batch;
}

SampleBatch mutate(SampleBatch batch, const MutationPolicy& policy, Rng& rng,
                   const TensorTrain& tt) {
  if (!(policy.epsilon >= 0.0 && policy.epsilon <= 1.0))
    throw InvalidArgument("mutation probability must lie in [0, 1]");
  batch.mutation_counts.resize(batch.size(), 0);
  if (policy.epsilon == 0.0) return batch;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Config& x = batch.configs[i];
    std::size_t count = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (uniform01(rng) < policy.epsilon) {
        x[k] = static_cast<int>(uniform_index(rng, tt.local_dim(k)));
        ++count;
      }
    }
    batch.mutation_counts[i] = count;
    if (count > 0) batch.scores[i] = tt.score(x);
  }
  return batch;
}

} // namespace tteda
