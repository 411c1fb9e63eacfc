#pragma once

#include <filesystem>
#include <string>

#include "c2f/model/model.hpp"

namespace c2f::model {

// Binary checkpoint, all fields little-endian:
//
//   char[4]  magic "C2F1"
//   u32      feature_dim
//   u32      num_classes
//   u32      max_frames
//   u32      conv_channels
//   u32      kernel_width
//   u32      head layout (0 decomposed, 1 single)
//   u32      hidden layer count L
//   u32[L]   hidden sizes
//   f32      fg_threshold
//   f32      topk_ratio
//   u32      tensor count N
//   N times:
//     u32      rank R
//     u32[R]   extents
//     f32[...] values, row-major
//
// Tensors appear in ModelParams::named() order.
inline constexpr char kCheckpointMagic[4] = {'C', '2', 'F', '1'};

std::string encode_checkpoint(const ModelParams& params);
ModelParams decode_checkpoint(const std::string& bytes);

// Throws IoError on filesystem failures and on malformed files.
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace c2f::model
