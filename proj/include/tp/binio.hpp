#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tp::binio {

// Little-endian encoder into an in-memory buffer.
class Writer {
 public:
  void magic(std::string_view m) { buf_.append(m); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f32(float v);
  void f64(double v);
  void str(std::string_view s);
  void f32s(std::span<const float> v);
  void f64s(std::span<const double> v);

  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

// Bounds-checked little-endian decoder. Every read past the end throws
// FormatError mentioning the format name.
class Reader {
 public:
  Reader(std::string_view data, std::string format)
      : data_(data), format_(std::move(format)) {}

  void expect_magic(std::string_view m);
  std::uint8_t u8();
  std::uint32_t u32();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  float f32();
  double f64();
  std::string str();
  void f32s(std::span<float> out);
  void f64s(std::span<double> out);

  bool at_end() const { return pos_ == data_.size(); }
  [[noreturn]] void fail(const std::string& why) const;

 private:
  std::string_view take(std::size_t n);

  std::string_view data_;
  std::string format_;
  std::size_t pos_ = 0;
};

}  // namespace tp::binio
