#pragma once

#include <span>
#include <string>
#include <vector>

#include "c2f/model/model.hpp"
#include "c2f/numerics/tape.hpp"

namespace c2f::losses {

using numerics::Tape;
using numerics::Var;

struct LossWeights {
  float alpha = 0.5f;   // foreground loss
  float beta = 1.0f;    // conditional loss
  float gamma = 0.01f;  // background-only total mass
  float delta = 0.1f;   // Laplacian (total variation) term

  void validate() const;
};

// Scalar values of every term for one video or a batch mean.
//   foreground = ce + gamma * bg_only + delta * laplacian
//   total      = video + alpha * foreground + beta * cs
struct LossBreakdown {
  float ce = 0.0f;
  float bg_only = 0.0f;
  float laplacian = 0.0f;
  float foreground = 0.0f;
  float cs = 0.0f;
  float video = 0.0f;
  float total = 0.0f;

  // Throws NonFiniteError naming the first non-finite component.
  void check_finite() const;
  std::string to_string() const;
};

// A loss term that may have had nothing to average over.
struct Term {
  Var value;
  bool empty = false;  // no selected entries; value is 0
};

// Mean BCE of thresholded foreground scores against binary frame labels,
// over frames with label_mask set.
Term bce_foreground(Tape& tape, Var fg_thresholded, std::span<const float> labels,
                    std::span<const float> label_mask);

// Mean |F| over valid frames when the video is background-only, else 0.
Var total_mass_bg(Tape& tape, Var foreground, std::span<const float> mask, bool is_bg_only);

// Mean |F[t+1] - F[t]| over consecutive valid frame pairs.
Var laplacian_reg(Tape& tape, Var foreground, std::span<const float> mask);

// Mean multi-label BCE of CS [T x C] over (foreground frame, class) pairs.
// frame_labels is T x C row-major; fg_mask selects frames.
Term conditional_loss(Tape& tape, Var conditional, std::span<const float> frame_labels,
                      std::span<const float> fg_mask);

// Mean multi-label BCE of the video score y [C] against labels Y [C].
Var video_loss(Tape& tape, Var video_scores, std::span<const float> video_labels);

// Pure composition of already-computed components; fills foreground and
// total from ce/bg_only/laplacian/cs/video. Throws on non-finite input.
LossBreakdown compose(LossBreakdown components, const LossWeights& weights);

// Component-wise mean of per-video breakdowns.
LossBreakdown batch_mean(std::span<const LossBreakdown> per_video);

// Tape handles of every term so the total can be differentiated.
struct LossGraph {
  Var ce, bg_only, laplacian, foreground, cs, video, total;

  LossBreakdown values(const Tape& tape) const;
};

// Per-video supervision as consumed by the loss terms; spans index frames of
// the (padded) model input.
struct VideoTargets {
  std::span<const float> frame_mask;     // [T] real frames
  std::span<const float> fg_labels;      // [T]
  std::span<const float> fg_label_mask;  // [T]
  std::span<const float> cond_labels;    // [T x C]
  std::span<const float> fg_frame_mask;  // [T]
  std::span<const float> video_labels;   // [C]
  bool is_bg_only = false;
};

// Which terms participate. The decomposed model uses all of them; the
// single-head ablation arms train the action head directly on frame labels.
enum class Objective {
  kFirstOccurrence,           // frame terms only, single head
  kFirstOccurrenceVideo,      // + video-level top-k loss, single head
  kDecomposed,                // full objective on the two-head model
};

// Builds every term on the tape for one video and composes the total.
// Terms an objective leaves out are recorded as constant zeros.
LossGraph total_loss(Tape& tape, const model::ScoreGraph& scores, const VideoTargets& targets,
                     const LossWeights& weights, Objective objective);

}  // namespace c2f::losses
