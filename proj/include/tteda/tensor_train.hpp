#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tteda {

/// A discrete configuration: one symbol per site, 0-based.
using Config = std::vector<int>;

/// Order-3 core of shape (left, phys, right), stored row-major.
class Core {
public:
  Core() = default;
  Core(std::size_t left, std::size_t phys, std::size_t right, double fill = 0.0);
  Core(std::size_t left, std::size_t phys, std::size_t right, std::vector<double> data);

  std::size_t left() const { return left_; }
  std::size_t phys() const { return phys_; }
  std::size_t right() const { return right_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t a, std::size_t m, std::size_t b) {
    return data_[(a * phys_ + m) * right_ + b];
  }
  double operator()(std::size_t a, std::size_t m, std::size_t b) const {
    return data_[(a * phys_ + m) * right_ + b];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double frobenius_norm() const;
  bool same_shape(const Core& other) const {
    return left_ == other.left_ && phys_ == other.phys_ && right_ == other.right_;
  }

private:
  std::size_t left_ = 0;
  std::size_t phys_ = 0;
  std::size_t right_ = 0;
  std::vector<double> data_;
};

/// Summed environments of a tensor train. left[k] contracts cores 0..k-1 and
/// right[k] contracts cores k+1..L-1, physical indices summed in both.
/// left[0] and right[L-1] are the scalar 1.
struct EnvironmentCache {
  std::vector<std::vector<double>> left;
  std::vector<std::vector<double>> right;
};

/// Non-negative tensor train defining the unnormalized score
/// S(x) = A0(x0) A1(x1) ... A_{L-1}(x_{L-1}).
class TensorTrain {
public:
  TensorTrain() = default;
  /// Validates boundary bonds, bond matching and non-negativity.
  explicit TensorTrain(std::vector<Core> cores);

  /// Constant-filled chain; internal bonds are chi, boundary bonds 1.
  static TensorTrain uniform(std::span<const std::size_t> local_dims, std::size_t chi,
                             double fill = 1.0);

  std::size_t length() const { return cores_.size(); }
  std::size_t local_dim(std::size_t k) const { return cores_[k].phys(); }
  std::vector<std::size_t> local_dims() const;
  const Core& core(std::size_t k) const { return cores_[k]; }
  /// Mutable access; callers are responsible for keeping entries non-negative.
  Core& core(std::size_t k) { return cores_[k]; }
  const std::vector<Core>& cores() const { return cores_; }

  /// Throws InvalidArgument when x has the wrong length or a symbol is out of range.
  void check_config(std::span<const int> x) const;

  double score(std::span<const int> x) const;
  /// Sum of scores over all configurations by summed-core contraction.
  /// Throws DegenerateModel when the result is not positive.
  double partition() const;
  EnvironmentCache environments() const;

  /// Divides each core by its own Frobenius norm.
  void renormalize();
  TensorTrain renormalized() const;

  /// Adds `floor` to every entry.
  void add_floor(double floor);

private:
  void validate() const;
  std::vector<Core> cores_;
};

/// Left-to-right product of projected cores 0..k-1 (length = left bond of core k).
std::vector<double> projected_left(const TensorTrain& tt, std::span<const int> x, std::size_t k);
/// Right-to-left product of projected cores k+1..L-1 (length = right bond of core k).
std::vector<double> projected_right(const TensorTrain& tt, std::span<const int> x, std::size_t k);

/// row * A(:, m, :)
void absorb_left(std::span<const double> row, const Core& core, int m, std::vector<double>& out);
/// A(:, m, :) * col
void absorb_right(const Core& core, int m, std::span<const double> col, std::vector<double>& out);

// Checkpoint files: JSON {"format": "tteda-tensor-train", "version": 1,
// "cores": [{"shape": [l, d, r], "data": [... row-major ...]}, ...]}
void save_tensor_train(const TensorTrain& tt, const std::filesystem::path& path);
TensorTrain load_tensor_train(const std::filesystem::path& path);
std::string tensor_train_to_json(const TensorTrain& tt);
TensorTrain tensor_train_from_json(const std::string& text);

} // namespace tteda
