#ifndef ATOMO_TENSOR_HPP
#define ATOMO_TENSOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include <atomo/errors.hpp>

namespace atomo {

/// Dense real n-dimensional array, 64-bit scalars, row-major flat storage.
/// All entries must be finite; construction rejects NaN/Inf.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<Eigen::Index> shape, Eigen::VectorXd data);

  static Tensor zeros(std::vector<Eigen::Index> shape);
  static Tensor from_matrix(const Eigen::MatrixXd& m);

  const std::vector<Eigen::Index>& shape() const { return shape_; }
  const Eigen::VectorXd& data() const { return data_; }
  Eigen::VectorXd& data() { return data_; }
  Eigen::Index size() const { return data_.size(); }
  int rank() const { return static_cast<int>(shape_.size()); }

  bool is_matrix() const { return rank() == 2; }
  Eigen::Index rows() const;
  Eigen::Index cols() const;

  /// Row-major view of a rank-2 tensor as an Eigen matrix (copy).
  Eigen::MatrixXd as_matrix() const;

  double relative_frobenius_distance(const Tensor& other) const;

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  std::vector<Eigen::Index> shape_;
  Eigen::VectorXd data_;  // row-major
};

/// "ATEN" fixture format: magic, u8 rank, u64 dims, little-endian f64
/// entries in row-major order.
Tensor load_tensor(const std::string& path);
void save_tensor(const Tensor& t, const std::string& path);

Tensor decode_tensor(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_tensor(const Tensor& t);

}  // namespace atomo

#endif  // ATOMO_TENSOR_HPP
