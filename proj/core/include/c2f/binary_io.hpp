#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "c2f/errors.hpp"

namespace c2f::binary {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; add byte swapping for this target");

inline void put_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

inline void put_f32(std::string& out, float v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

// Bounds-checked sequential reader over a byte buffer.
class Reader {
 public:
  Reader(std::string_view bytes, std::string context)
      : bytes_(bytes), context_(std::move(context)) {}

  void expect_magic(const char (&magic)[4]) {
    need(4);
    if (std::memcmp(bytes_.data() + pos_, magic, 4) != 0) {
      throw IoError(context_ + ": bad magic, expected '" + std::string(magic, 4) + "'");
    }
    pos_ += 4;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, bytes_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }

  float f32() {
    need(4);
    float v;
    std::memcpy(&v, bytes_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }

  void f32_array(float* out, std::size_t count) {
    need(count * 4);
    std::memcpy(out, bytes_.data() + pos_, count * 4);
    pos_ += count * 4;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  const std::string& context() const noexcept { return context_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw IoError(context_ + ": truncated file");
    }
  }

  std::string_view bytes_;
  std::string context_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames, so readers never see a
// half-written file.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace c2f::binary
