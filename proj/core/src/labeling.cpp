#include "c2f/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "c2f/errors.hpp"
#include "c2f/rng.hpp"

namespace c2f::labeling {

std::size_t FrameSupervision::positive_count() const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    n += (fg_label_mask[t] > 0.0f && fg_labels[t] > 0.0f) ? 1 : 0;
  }
  return n;
}

std::size_t FrameSupervision::negative_count() const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    n += (fg_label_mask[t] > 0.0f && fg_labels[t] == 0.0f) ? 1 : 0;
  }
  return n;
}

void validate_annotations(std::span<const FirstOccurrence> annotations, std::size_t video_len,
                          std::size_t num_classes) {
  for (const auto& a : annotations) {
    const std::string where = "class " + std::to_string(a.class_id) + " interval [" +
                              std::to_string(a.start) + ", " + std::to_string(a.end) + ")";
    if (a.class_id >= num_classes) {
      throw AnnotationError(where + ": class id out of range (C=" + std::to_string(num_classes) +
                            ")");
    }
    if (a.start >= a.end) {
      throw AnnotationError(where + ": empty interval");
    }
    if (a.end > video_len) {
      throw AnnotationError(where + ": exceeds video length " + std::to_string(video_len));
    }
  }
}

FrameRange bg_candidate_region(std::span<const FirstOccurrence> annotations,
                               std::size_t video_len) {
  std::size_t earliest = video_len;
  for (const auto& a : annotations) {
    earliest = std::min(earliest, a.start);
  }
  return {0, earliest};
}

std::size_t negative_sample_count(double bg_fraction, std::size_t candidates) {
  if (candidates == 0) {
    return 0;
  }
  // 0.2 * 35 is 7.000000000000001 in binary; do not let that become 8.
  const double raw = bg_fraction * static_cast<double>(candidates);
  const auto n = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::min(n, candidates);
}

FrameSupervision derive_supervision(std::span<const FirstOccurrence> annotations,
                                    std::size_t video_len, std::size_t num_classes,
                                    double bg_fraction, std::uint64_t seed) {
  if (!(bg_fraction >= 0.0 && bg_fraction <= 1.0)) {
    throw ConfigError("bg_fraction must be in [0, 1]");
  }
  validate_annotations(annotations, video_len, num_classes);

  FrameSupervision s;
  s.frames = video_len;
  s.num_classes = num_classes;
  s.fg_labels.assign(video_len, 0.0f);
  s.fg_label_mask.assign(video_len, 0.0f);
  s.cond_labels.assign(video_len * num_classes, 0.0f);
  s.fg_frame_mask.assign(video_len, 0.0f);
  s.is_bg_only = annotations.empty();
  if (s.is_bg_only) {
    return s;
  }

  for (const auto& a : annotations) {
    for (std::size_t t = a.start; t < a.end; ++t) {
      s.fg_labels[t] = 1.0f;
      s.fg_label_mask[t] = 1.0f;
      s.fg_frame_mask[t] = 1.0f;
      s.cond_labels[t * num_classes + a.class_id] = 1.0f;
    }
  }

  const FrameRange region = bg_candidate_region(annotations, video_len);
  const std::size_t take = negative_sample_count(bg_fraction, region.size());
  if (take > 0) {
    std::vector<std::size_t> candidates(region.size());
    std::iota(candidates.begin(), candidates.end(), region.begin);
    // Partial Fisher-Yates: the first `take` slots end up a uniform sample.
    Rng rng(seed);
    for (std::size_t i = 0; i < take; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
      std::swap(candidates[i], candidates[j]);
    }
    for (std::size_t i = 0; i < take; ++i) {
      s.fg_label_mask[candidates[i]] = 1.0f;
    }
  }
  return s;
}

}  // namespace c2f::labeling
