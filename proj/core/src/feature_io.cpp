#include "c2f/synthdata/feature_io.hpp"

#include <fstream>

#include "c2f/binary_io.hpp"
#include "c2f/errors.hpp"

namespace c2f::synthdata {

using numerics::Shape;
using numerics::Tensor;

std::string encode_features(const Tensor& features) {
  if (features.rank() != 2) {
    throw DimensionError("features must be [T x D], got " + numerics::to_string(features.shape()));
  }
  std::string out(kFeatureMagic, 4);
  out.reserve(kFeatureHeaderBytes + features.size() * 4);
  binary::put_u32(out, static_cast<std::uint32_t>(features.dim(0)));
  binary::put_u32(out, static_cast<std::uint32_t>(features.dim(1)));
  binary::put_u32(out, 0);
  for (const float v : features.values()) {
    binary::put_f32(out, v);
  }
  return out;
}

Tensor decode_features(const std::string& bytes, const std::string& context) {
  binary::Reader in(bytes, context);
  in.expect_magic(kFeatureMagic);
  const std::size_t frames = in.u32();
  const std::size_t dim = in.u32();
  in.u32();
  if (in.remaining() != frames * dim * 4) {
    throw IoError(context + ": header says " + std::to_string(frames) + "x" + std::to_string(dim) +
                  " but payload has " + std::to_string(in.remaining()) + " bytes");
  }
  Tensor t(Shape{frames, dim});
  in.f32_array(t.data(), t.size());
  return t;
}

void write_features(const std::filesystem::path& path, const Tensor& features) {
  binary::write_file(path, encode_features(features));
}

Tensor read_features(const std::filesystem::path& path) {
  return decode_features(binary::read_file(path), path.string());
}

FeatureHeader read_feature_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string head(kFeatureHeaderBytes, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  if (in.gcount() != static_cast<std::streamsize>(head.size())) {
    throw IoError(path.string() + ": truncated header");
  }
  binary::Reader r(head, path.string());
  r.expect_magic(kFeatureMagic);
  FeatureHeader h;
  h.frames = r.u32();
  h.feature_dim = r.u32();
  return h;
}

}  // namespace c2f::synthdata
