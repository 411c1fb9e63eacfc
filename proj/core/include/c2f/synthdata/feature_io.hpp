#pragma once

#include <filesystem>
#include <string>

#include "c2f/numerics/tensor.hpp"

namespace c2f::synthdata {

// Per-video feature file, little-endian:
//   char[4] "C2FV", u32 frames, u32 feature_dim, u32 reserved (0),
//   then frames * feature_dim f32 values, row-major.
inline constexpr char kFeatureMagic[4] = {'C', '2', 'F', 'V'};
inline constexpr std::size_t kFeatureHeaderBytes = 16;

struct FeatureHeader {
  std::size_t frames = 0;
  std::size_t feature_dim = 0;
};

std::string encode_features(const numerics::Tensor& features);
numerics::Tensor decode_features(const std::string& bytes, const std::string& context);

void write_features(const std::filesystem::path& path, const numerics::Tensor& features);
// Throws IoError naming the path for missing, truncated or malformed files.
numerics::Tensor read_features(const std::filesystem::path& path);
FeatureHeader read_feature_header(const std::filesystem::path& path);

}  // namespace c2f::synthdata
