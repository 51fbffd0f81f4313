#include <atomo/tensor.hpp>

#include <cmath>
#include <fstream>

#include <atomo/wire_io.hpp>

namespace atomo {

namespace {

Eigen::Index shape_product(const std::vector<Eigen::Index>& shape) {
  Eigen::Index n = 1;
  for (Eigen::Index d : shape) {
    if (d <= 0) throw ShapeError("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<Eigen::Index> shape, Eigen::VectorXd data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size())
    throw ShapeError("shape/data length mismatch");
  if (!data_.allFinite()) throw Error("tensor entries must be finite");
}

Tensor Tensor::zeros(std::vector<Eigen::Index> shape) {
  Eigen::Index n = shape_product(shape);
  return Tensor(std::move(shape), Eigen::VectorXd::Zero(n));
}

Tensor Tensor::from_matrix(const Eigen::MatrixXd& m) {
  Eigen::VectorXd flat(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      flat(i * m.cols() + j) = m(i, j);
  return Tensor({m.rows(), m.cols()}, std::move(flat));
}

Eigen::Index Tensor::rows() const {
  if (!is_matrix()) throw ShapeError("rows(): tensor is not a matrix");
  return shape_[0];
}

Eigen::Index Tensor::cols() const {
  if (!is_matrix()) throw ShapeError("cols(): tensor is not a matrix");
  return shape_[1];
}

Eigen::MatrixXd Tensor::as_matrix() const {
  if (!is_matrix()) throw ShapeError("as_matrix(): tensor is not a matrix");
  Eigen::MatrixXd m(shape_[0], shape_[1]);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = data_(i * m.cols() + j);
  return m;
}

double Tensor::relative_frobenius_distance(const Tensor& other) const {
  if (shape_ != other.shape_) throw ShapeError("shape mismatch");
  double ref = data_.norm();
  double dist = (data_ - other.data_).norm();
  return ref == 0.0 ? dist : dist / ref;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  ByteWriter w;
  w.raw("ATEN", 4);
  w.u8(static_cast<std::uint8_t>(t.rank()));
  for (Eigen::Index d : t.shape()) w.u64(static_cast<std::uint64_t>(d));
  for (Eigen::Index i = 0; i < t.size(); ++i) w.f64(t.data()(i));
  return w.take();
}

Tensor decode_tensor(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect("ATEN", 4, "magic");
  int rank = r.u8();
  std::vector<Eigen::Index> shape(rank);
  Eigen::Index n = 1;
  for (int i = 0; i < rank; ++i) {
    shape[i] = static_cast<Eigen::Index>(r.u64());
    if (shape[i] <= 0) throw ParseError("non-positive dimension", r.offset());
    n *= shape[i];
  }
  r.require(static_cast<std::size_t>(n) * 8, "tensor payload");
  Eigen::VectorXd data(n);
  for (Eigen::Index i = 0; i < n; ++i) data(i) = r.f64();
  if (!r.exhausted()) throw ParseError("trailing bytes", r.offset());
  return Tensor(std::move(shape), std::move(data));
}

Tensor load_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open tensor file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

void save_tensor(const Tensor& t, const std::string& path) {
  auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write tensor file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace atomo
