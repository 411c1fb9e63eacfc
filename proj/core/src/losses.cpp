#include "c2f/losses.hpp"

#include <cmath>
#include <sstream>

#include "c2f/errors.hpp"
#include "c2f/numerics/ops.hpp"

namespace c2f::losses {

namespace ops = numerics;
using numerics::Tensor;

void LossWeights::validate() const {
  if (!(alpha >= 0.0f) || !(beta >= 0.0f) || !(gamma >= 0.0f) || !(delta >= 0.0f)) {
    throw ConfigError("loss weights must all be >= 0");
  }
}

void LossBreakdown::check_finite() const {
  const std::pair<const char*, float> fields[] = {
      {"L_ce", ce}, {"L_bg_only", bg_only}, {"L_laplacian", laplacian}, {"L_foreground", foreground},
      {"L_cs", cs}, {"L_video", video},     {"L_total", total}};
  for (const auto& [name, v] : fields) {
    if (!std::isfinite(v)) {
      throw NonFiniteError(std::string("non-finite loss component ") + name + " (" + to_string() +
                           ")");
    }
  }
}

std::string LossBreakdown::to_string() const {
  std::ostringstream os;
  os << "ce=" << ce << " bg_only=" << bg_only << " laplacian=" << laplacian
     << " foreground=" << foreground << " cs=" << cs << " video=" << video << " total=" << total;
  return os.str();
}

namespace {

bool any_set(std::span<const float> mask) {
  for (const float m : mask) {
    if (m > 0.0f) {
      return true;
    }
  }
  return false;
}

// Expands a per-frame mask over `width` classes.
std::vector<float> broadcast_rows(std::span<const float> mask, std::size_t width) {
  std::vector<float> out(mask.size() * width);
  for (std::size_t t = 0; t < mask.size(); ++t) {
    for (std::size_t c = 0; c < width; ++c) {
      out[t * width + c] = mask[t];
    }
  }
  return out;
}

Var zero(Tape& tape) {
  return tape.constant(Tensor::scalar(0.0f));
}

}  // namespace

Term bce_foreground(Tape& tape, Var fg_thresholded, std::span<const float> labels,
                    std::span<const float> label_mask) {
  return {ops::masked_bce(tape, fg_thresholded, labels, label_mask), !any_set(label_mask)};
}

Var total_mass_bg(Tape& tape, Var foreground, std::span<const float> mask, bool is_bg_only) {
  if (!is_bg_only) {
    return zero(tape);
  }
  return ops::masked_abs_mean(tape, foreground, mask);
}

Var laplacian_reg(Tape& tape, Var foreground, std::span<const float> mask) {
  return ops::masked_total_variation(tape, foreground, mask);
}

Term conditional_loss(Tape& tape, Var conditional, std::span<const float> frame_labels,
                      std::span<const float> fg_mask) {
  const auto& shape = tape.shape(conditional);
  if (shape.size() != 2 || shape[0] != fg_mask.size()) {
    throw DimensionError("conditional_loss: scores " + numerics::to_string(shape) +
                         " do not match a frame mask of " + std::to_string(fg_mask.size()));
  }
  const auto weights = broadcast_rows(fg_mask, shape[1]);
  return {ops::masked_bce(tape, conditional, frame_labels, weights), !any_set(fg_mask)};
}

Var video_loss(Tape& tape, Var video_scores, std::span<const float> video_labels) {
  const std::vector<float> all(video_labels.size(), 1.0f);
  return ops::masked_bce(tape, video_scores, video_labels, all);
}

LossBreakdown compose(LossBreakdown c, const LossWeights& w) {
  c.foreground = c.ce + w.gamma * c.bg_only + w.delta * c.laplacian;
  c.total = c.video + w.alpha * c.foreground + w.beta * c.cs;
  c.check_finite();
  return c;
}

LossBreakdown batch_mean(std::span<const LossBreakdown> per_video) {
  LossBreakdown m;
  if (per_video.empty()) {
    return m;
  }
  double acc[7] = {};
  for (const auto& b : per_video) {
    acc[0] += b.ce;
    acc[1] += b.bg_only;
    acc[2] += b.laplacian;
    acc[3] += b.foreground;
    acc[4] += b.cs;
    acc[5] += b.video;
    acc[6] += b.total;
  }
  const double n = static_cast<double>(per_video.size());
  m.ce = static_cast<float>(acc[0] / n);
  m.bg_only = static_cast<float>(acc[1] / n);
  m.laplacian = static_cast<float>(acc[2] / n);
  m.foreground = static_cast<float>(acc[3] / n);
  m.cs = static_cast<float>(acc[4] / n);
  m.video = static_cast<float>(acc[5] / n);
  m.total = static_cast<float>(acc[6] / n);
  return m;
}

LossBreakdown LossGraph::values(const Tape& tape) const {
  LossBreakdown b;
  b.ce = tape.value(ce).item();
  b.bg_only = tape.value(bg_only).item();
  b.laplacian = tape.value(laplacian).item();
  b.foreground = tape.value(foreground).item();
  b.cs = tape.value(cs).item();
  b.video = tape.value(video).item();
  b.total = tape.value(total).item();
  return b;
}

LossGraph total_loss(Tape& tape, const model::ScoreGraph& scores, const VideoTargets& targets,
                     const LossWeights& weights, Objective objective) {
  LossGraph g;
  if (objective == Objective::kDecomposed) {
    if (!scores.foreground.valid()) {
      throw ContractError("total_loss: decomposed objective needs a foreground head");
    }
    g.ce = bce_foreground(tape, scores.foreground_thresholded, targets.fg_labels,
                          targets.fg_label_mask)
               .value;
    g.bg_only = total_mass_bg(tape, scores.foreground, targets.frame_mask, targets.is_bg_only);
    g.laplacian = laplacian_reg(tape, scores.foreground, targets.frame_mask);
    g.cs = conditional_loss(tape, scores.conditional, targets.cond_labels, targets.fg_frame_mask)
               .value;
    g.video = video_loss(tape, scores.video, targets.video_labels);
    g.foreground = ops::weighted_sum(
        tape, {{1.0f, g.ce}, {weights.gamma, g.bg_only}, {weights.delta, g.laplacian}});
    g.total = ops::weighted_sum(
        tape, {{1.0f, g.video}, {weights.alpha, g.foreground}, {weights.beta, g.cs}});
  } else {
    // Single head: the action score is supervised per class on every
    // labeled frame (sampled negatives carry an all-zero label row) and on
    // the foreground frames alone.
    const std::size_t classes = tape.shape(scores.action)[1];
    const auto labeled = broadcast_rows(targets.fg_label_mask, classes);
    g.ce = ops::masked_bce(tape, scores.action, targets.cond_labels, labeled);
    g.bg_only = zero(tape);
    g.laplacian = zero(tape);
    g.cs = conditional_loss(tape, scores.action, targets.cond_labels, targets.fg_frame_mask).value;
    g.video = objective == Objective::kFirstOccurrenceVideo
                  ? video_loss(tape, scores.video, targets.video_labels)
                  : zero(tape);
    const float video_weight = objective == Objective::kFirstOccurrenceVideo ? 1.0f : 0.0f;
    g.foreground = ops::weighted_sum(tape, {{1.0f, g.ce}});
    g.total = ops::weighted_sum(
        tape, {{video_weight, g.video}, {weights.alpha, g.foreground}, {weights.beta, g.cs}});
  }
  const LossBreakdown check = g.values(tape);
  check.check_finite();
  return g;
}

}  // namespace c2f::losses
