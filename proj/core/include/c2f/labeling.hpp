#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace c2f::labeling {

// Earliest labeled instance of one class: frames [start, end), 1 frame/sec.
struct FirstOccurrence {
  std::size_t class_id = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const FirstOccurrence&, const FirstOccurrence&) = default;
};

// Frame-level targets derived from first-occurrence labels. Vectors are 0/1
// floats so the loss code can consume them directly.
struct FrameSupervision {
  std::size_t frames = 0;
  std::size_t num_classes = 0;
  std::vector<float> fg_labels;      // [T] 1 inside any first occurrence
  std::vector<float> fg_label_mask;  // [T] frames that carry a foreground label
  std::vector<float> cond_labels;    // [T x C] class membership of labeled fg frames
  std::vector<float> fg_frame_mask;  // [T] frames usable by the conditional loss
  bool is_bg_only = false;

  std::size_t positive_count() const;
  std::size_t negative_count() const;
};

struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return end <= begin; }
};

// Throws AnnotationError unless start < end <= video_len and class_id < C.
void validate_annotations(std::span<const FirstOccurrence> annotations, std::size_t video_len,
                          std::size_t num_classes);

// Frames that are safe negatives: [0, earliest start over labeled classes),
// or the whole video when nothing is labeled.
FrameRange bg_candidate_region(std::span<const FirstOccurrence> annotations,
                               std::size_t video_len);

// Number of negatives drawn from `candidates` frames: ceil(fraction * n).
std::size_t negative_sample_count(double bg_fraction, std::size_t candidates);

// Positives are the union of the first-occurrence intervals. Negatives are a
// seeded uniform sample of ceil(bg_fraction * |candidates|) frames before the
// earliest first occurrence. A video without annotations carries no frame
// labels at all and is flagged background-only.
FrameSupervision derive_supervision(std::span<const FirstOccurrence> annotations,
                                    std::size_t video_len, std::size_t num_classes,
                                    double bg_fraction, std::uint64_t seed);

}  // namespace c2f::labeling
