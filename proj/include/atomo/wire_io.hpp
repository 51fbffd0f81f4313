#ifndef ATOMO_WIRE_IO_HPP
#define ATOMO_WIRE_IO_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <atomo/errors.hpp>

namespace atomo {

// Little-endian byte stream helpers shared by the tensor fixture format
// and the wire codec.

class ByteWriter {
 public:
  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f32(float v) { put(v); }
  void f64(double v) { put(v); }
  void raw(const char* s, std::size_t n) {
    buf_.insert(buf_.end(), s, s + n);
  }

 private:
  template <typename T>
  void put(T v) {
    std::uint8_t tmp[sizeof(T)];
    std::memcpy(tmp, &v, sizeof(T));
    buf_.insert(buf_.end(), tmp, tmp + sizeof(T));
  }
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& b) : buf_(b) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }
  bool exhausted() const { return pos_ == buf_.size(); }

  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  float f32() { return get<float>(); }
  double f64() { return get<double>(); }

  void expect(const char* s, std::size_t n, const std::string& what) {
    if (remaining() < n)
      throw ParseError("truncated " + what + ": expected " +
                           std::to_string(n) + " bytes, have " +
                           std::to_string(remaining()),
                       pos_);
    if (std::memcmp(buf_.data() + pos_, s, n) != 0)
      throw ParseError("bad " + what, pos_);
    pos_ += n;
  }

  void require(std::size_t n, const std::string& what) const {
    if (remaining() < n)
      throw ParseError("truncated message: " + what + " needs " +
                           std::to_string(n) + " bytes, have " +
                           std::to_string(remaining()),
                       pos_);
  }

 private:
  template <typename T>
  T get() {
    require(sizeof(T), "field");
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  const std::vector<std::uint8_t>& buf_;
  std::size_t pos_ = 0;
};

}  // namespace atomo

#endif  // ATOMO_WIRE_IO_HPP
