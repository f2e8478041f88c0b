#include "tp/binio.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tp/error.hpp"
#include "tp/util.hpp"

namespace tp {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::string normalize_space(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace tp

namespace tp::binio {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

void Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void Writer::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void Writer::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
void Writer::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void Writer::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.append(s);
}

void Writer::f32s(std::span<const float> v) {
  if constexpr (std::endian::native == std::endian::little) {
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size_bytes());
  } else {
    for (float x : v) f32(x);
  }
}

void Writer::f64s(std::span<const double> v) {
  for (double x : v) f64(x);
}

void Reader::fail(const std::string& why) const {
  throw FormatError(format_ + ": " + why + " at byte " + std::to_string(pos_));
}

std::string_view Reader::take(std::size_t n) {
  if (data_.size() - pos_ < n) fail("truncated file");
  auto s = data_.substr(pos_, n);
  pos_ += n;
  return s;
}

void Reader::expect_magic(std::string_view m) {
  if (data_.size() < m.size() || data_.substr(0, m.size()) != m) {
    throw FormatError("not a " + format_ + " file (bad magic bytes, expected \"" +
                      std::string(m) + "\")");
  }
  pos_ = m.size();
}

std::uint8_t Reader::u8() { return static_cast<std::uint8_t>(take(1)[0]); }

std::uint32_t Reader::u32() {
  auto b = take(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
  return v;
}

std::uint64_t Reader::u64() {
  auto b = take(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
  return v;
}

float Reader::f32() { return std::bit_cast<float>(u32()); }
double Reader::f64() { return std::bit_cast<double>(u64()); }

std::string Reader::str() {
  auto n = u32();
  return std::string(take(n));
}

void Reader::f32s(std::span<float> out) {
  if constexpr (std::endian::native == std::endian::little) {
    auto b = take(out.size_bytes());
    std::memcpy(out.data(), b.data(), b.size());
  } else {
    for (auto& x : out) x = f32();
  }
}

void Reader::f64s(std::span<double> out) {
  for (auto& x : out) x = f64();
}

}  // namespace tp::binio
