#include "c2f/model/checkpoint.hpp"

#include "c2f/binary_io.hpp"
#include "c2f/errors.hpp"

namespace c2f::model {

std::string encode_checkpoint(const ModelParams& params) {
  const ModelConfig& c = params.config;
  std::string out(kCheckpointMagic, 4);
  binary::put_u32(out, static_cast<std::uint32_t>(c.feature_dim));
  binary::put_u32(out, static_cast<std::uint32_t>(c.num_classes));
  binary::put_u32(out, static_cast<std::uint32_t>(c.max_frames));
  binary::put_u32(out, static_cast<std::uint32_t>(c.conv_channels));
  binary::put_u32(out, static_cast<std::uint32_t>(c.kernel_width));
  binary::put_u32(out, static_cast<std::uint32_t>(c.heads));
  binary::put_u32(out, static_cast<std::uint32_t>(c.hidden.size()));
  for (const auto h : c.hidden) {
    binary::put_u32(out, static_cast<std::uint32_t>(h));
  }
  binary::put_f32(out, c.fg_threshold);
  binary::put_f32(out, c.topk_ratio);
  const auto tensors = params.tensors();
  binary::put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto* t : tensors) {
    binary::put_u32(out, static_cast<std::uint32_t>(t->rank()));
    for (const auto extent : t->shape()) {
      binary::put_u32(out, static_cast<std::uint32_t>(extent));
    }
    for (const float v : t->values()) {
      binary::put_f32(out, v);
    }
  }
  return out;
}

ModelParams decode_checkpoint(const std::string& bytes) {
  binary::Reader in(bytes, "checkpoint");
  in.expect_magic(kCheckpointMagic);
  ModelConfig c;
  c.feature_dim = in.u32();
  c.num_classes = in.u32();
  c.max_frames = in.u32();
  c.conv_channels = in.u32();
  c.kernel_width = in.u32();
  const std::uint32_t heads = in.u32();
  if (heads > 1) {
    throw IoError("checkpoint: unknown head layout " + std::to_string(heads));
  }
  c.heads = static_cast<HeadLayout>(heads);
  const std::uint32_t layers = in.u32();
  if (layers > 64) {
    throw IoError("checkpoint: implausible hidden layer count " + std::to_string(layers));
  }
  c.hidden.clear();
  for (std::uint32_t i = 0; i < layers; ++i) {
    c.hidden.push_back(in.u32());
  }
  c.fg_threshold = in.f32();
  c.topk_ratio = in.f32();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw IoError(std::string("checkpoint: invalid header: ") + e.what());
  }

  // Allocate the expected layout, then require the file to match it.
  ModelParams p = init_params(c, 0);
  auto named = p.named();
  const std::uint32_t count = in.u32();
  if (count != named.size()) {
    throw IoError("checkpoint: expected " + std::to_string(named.size()) + " tensors, found " +
                  std::to_string(count));
  }
  for (auto& [name, tensor] : named) {
    const std::uint32_t rank = in.u32();
    numerics::Shape shape;
    for (std::uint32_t i = 0; i < rank && i < 8; ++i) {
      shape.push_back(in.u32());
    }
    if (shape != tensor->shape()) {
      throw IoError("checkpoint: tensor '" + name + "' has shape " + numerics::to_string(shape) +
                    ", expected " + numerics::to_string(tensor->shape()));
    }
    in.f32_array(tensor->data(), tensor->size());
  }
  if (in.remaining() != 0) {
    throw IoError("checkpoint: " + std::to_string(in.remaining()) + " trailing bytes");
  }
  return p;
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  binary::write_file(path, encode_checkpoint(params));
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(binary::read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace c2f::model
