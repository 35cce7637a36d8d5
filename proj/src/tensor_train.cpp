#include "tteda/tensor_train.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tteda/error.hpp"

namespace tteda {

Core::Core(std::size_t left, std::size_t phys, std::size_t right, double fill)
    : left_(left), phys_(phys), right_(right), data_(left * phys * right, fill) {}

Core::Core(std::size_t left, std::size_t phys, std::size_t right, std::vector<double> data)
    : left_(left), phys_(phys), right_(right), data_(std::move(data)) {
  if (data_.size() != left * phys * right)
    throw InvalidArgument("core data size does not match its shape");
}

double Core::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

TensorTrain::TensorTrain(std::vector<Core> cores) : cores_(std::move(cores)) { validate(); }

void TensorTrain::validate() const {
  if (cores_.empty()) throw InvalidArgument("tensor train needs at least one core");
  if (cores_.front().left() != 1 || cores_.back().right() != 1)
    throw InvalidArgument("boundary bond dimensions must be 1");
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    const Core& c = cores_[k];
    if (c.phys() == 0 || c.left() == 0 || c.right() == 0)
      throw InvalidArgument("core " + std::to_string(k) + " has an empty dimension");
    if (k + 1 < cores_.size() && c.right() != cores_[k + 1].left())
      throw InvalidArgument("bond mismatch between cores " + std::to_string(k) + " and " +
                            std::to_string(k + 1));
    for (double v : c.data())
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InvalidArgument("core " + std::to_string(k) + " has a negative or non-finite entry");
  }
}

TensorTrain TensorTrain::uniform(std::span<const std::size_t> local_dims, std::size_t chi,
                                 double fill) {
  if (local_dims.empty()) throw InvalidArgument("local_dims must be non-empty");
  if (chi < 1) throw InvalidArgument("chi must be at least 1");
  if (!(fill > 0.0) || !std::isfinite(fill)) throw InvalidArgument("fill must be positive");
  const std::size_t n = local_dims.size();
  std::vector<Core> cores;
  cores.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (local_dims[k] == 0) throw InvalidArgument("local dimensions must be positive");
    cores.emplace_back(k == 0 ? 1 : chi, local_dims[k], k + 1 == n ? 1 : chi, fill);
  }
  return TensorTrain(std::move(cores));
}

std::vector<std::size_t> TensorTrain::local_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(cores_.size());
  for (const Core& c : cores_) dims.push_back(c.phys());
  return dims;
}

void TensorTrain::check_config(std::span<const int> x) const {
  if (x.size() != cores_.size())
    throw InvalidArgument("configuration length " + std::to_string(x.size()) +
                          " does not match train length " + std::to_string(cores_.size()));
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] < 0 || static_cast<std::size_t>(x[k]) >= cores_[k].phys())
      throw InvalidArgument("symbol " + std::to_string(x[k]) + " at site " + std::to_string(k) +
                            " is outside the alphabet");
}

void absorb_left(std::span<const double> row, const Core& core, int m, std::vector<double>& out) {
  out.assign(core.right(), 0.0);
  for (std::size_t a = 0; a < core.left(); ++a) {
    const double la = row[a];
    if (la == 0.0) continue;
    for (std::size_t b = 0; b < core.right(); ++b) out[b] += la * core(a, m, b);
  }
}

void absorb_right(const Core& core, int m, std::span<const double> col, std::vector<double>& out) {
  out.assign(core.left(), 0.0);
  for (std::size_t a = 0; a < core.left(); ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < core.right(); ++b) s += core(a, m, b) * col[b];
    out[a] = s;
  }
}

double TensorTrain::score(std::span<const int> x) const {
  check_config(x);
  std::vector<double> row{1.0}, next;
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    absorb_left(row, cores_[k], x[k], next);
    row.swap(next);
  }
  return row[0];
}

EnvironmentCache TensorTrain::environments() const {
  const std::size_t n = cores_.size();
  EnvironmentCache env;
  env.left.resize(n);
  env.right.resize(n);
  env.left[0] = {1.0};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Core& c = cores_[k];
    std::vector<double> out(c.right(), 0.0);
    for (std::size_t a = 0; a < c.left(); ++a)
      for (std::size_t m = 0; m < c.phys(); ++m)
        for (std::size_t b = 0; b < c.right(); ++b) out[b] += env.left[k][a] * c(a, m, b);
    env.left[k + 1] = std::move(out);
  }
  env.right[n - 1] = {1.0};
  for (std::size_t k = n - 1; k > 0; --k) {
    const Core& c = cores_[k];
    std::vector<double> out(c.left(), 0.0);
    for (std::size_t a = 0; a < c.left(); ++a)
      for (std::size_t m = 0; m < c.phys(); ++m)
        for (std::size_t b = 0; b < c.right(); ++b) out[a] += c(a, m, b) * env.right[k][b];
    env.right[k - 1] = std::move(out);
  }
  return env;
}

double TensorTrain::partition() const {
  std::vector<double> row{1.0};
  for (const Core& c : cores_) {
    std::vector<double> out(c.right(), 0.0);
    for (std::size_t a = 0; a < c.left(); ++a)
      for (std::size_t m = 0; m < c.phys(); ++m)
        for (std::size_t b = 0; b < c.right(); ++b) out[b] += row[a] * c(a, m, b);
    row = std::move(out);
  }
  const double z = row[0];
  if (!(z > 0.0) || !std::isfinite(z))
    throw DegenerateModel("partition function is not positive (Z = " + std::to_string(z) + ")");
  return z;
}

void TensorTrain::renormalize() {
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    const double norm = cores_[k].frobenius_norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw DegenerateModel("core " + std::to_string(k) + " has zero or non-finite norm");
    for (double& v : cores_[k].data()) v /= norm;
  }
}

TensorTrain TensorTrain::renormalized() const {
  TensorTrain copy = *this;
  copy.renormalize();
  return copy;
}

void TensorTrain::add_floor(double floor) {
  for (Core& c : cores_)
    for (double& v : c.data()) v += floor;
}

std::vector<double> projected_left(const TensorTrain& tt, std::span<const int> x, std::size_t k) {
  std::vector<double> row{1.0}, next;
  for (std::size_t j = 0; j < k; ++j) {
    absorb_left(row, tt.core(j), x[j], next);
    row.swap(next);
  }
  return row;
}

std::vector<double> projected_right(const TensorTrain& tt, std::span<const int> x, std::size_t k) {
  std::vector<double> col{1.0}, next;
  for (std::size_t j = tt.length() - 1; j > k; --j) {
    absorb_right(tt.core(j), x[j], col, next);
    col.swap(next);
  }
  return col;
}

std::string tensor_train_to_json(const TensorTrain& tt) {
  nlohmann::json doc;
  doc["format"] = "tteda-tensor-train";
  doc["version"] = 1;
  auto& cores = doc["cores"] = nlohmann::json::array();
  for (const Core& c : tt.cores()) {
    nlohmann::json jc;
    jc["shape"] = {c.left(), c.phys(), c.right()};
    jc["data"] = std::vector<double>(c.data().begin(), c.data().end());
    cores.push_back(std::move(jc));
  }
  return doc.dump(1);
}

TensorTrain tensor_train_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != "tteda-tensor-train" ||
        doc.at("version").get<int>() != 1)
      throw InvalidArgument("unsupported tensor train file format");
    std::vector<Core> cores;
    for (const auto& jc : doc.at("cores")) {
      const auto shape = jc.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 3) throw InvalidArgument("core shape must have three entries");
      cores.emplace_back(shape[0], shape[1], shape[2], jc.at("data").get<std::vector<double>>());
    }
    return TensorTrain(std::move(cores));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed tensor train file: ") + e.what());
  }
}

void save_tensor_train(const TensorTrain& tt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << tensor_train_to_json(tt) << '\n';
}

TensorTrain load_tensor_train(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return tensor_train_from_json(ss.str());
}

} // namespace tteda
