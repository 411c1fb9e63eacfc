#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "c2f/eval.hpp"
#include "c2f/inference.hpp"
#include "c2f/labeling.hpp"
#include "c2f/losses.hpp"
#include "c2f/model/model.hpp"
#include "c2f/synthdata/manifest.hpp"

namespace c2f::trainer {

// FO: single head, frame labels only. FO+VL: single head plus the video
// loss. FO+VL+PD: foreground x conditional heads with every term.
enum class Mode { kFO, kFOVL, kFull };

std::string mode_name(Mode mode);
Mode parse_mode(const std::string& name);  // ConfigError
losses::Objective objective_for(Mode mode);
model::HeadLayout heads_for(Mode mode);

struct TrainConfig {
  std::size_t batch_size = 8;
  float learning_rate = 1e-4f;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  double bg_fraction = 0.2;
  Mode mode = Mode::kFull;
  losses::LossWeights loss;
  model::ModelConfig model;

  void validate() const;  // ConfigError

  // Batch 16, lr 1e-5, 3600-frame windows, 1024/512 hidden units.
  static TrainConfig full_scale_preset();
};

// One training video padded or cut to a fixed window.
struct Example {
  std::string id;
  numerics::Tensor features;    // [T x D]
  std::vector<float> mask;      // [T]
  labeling::FrameSupervision supervision;  // over the T-frame window
  std::vector<float> video_labels;         // [C]
};

// Negatives are drawn once per video from derive_seed(seed, "negatives/<id>").
Example make_example(const synthdata::Manifest& manifest, const synthdata::VideoEntry& video,
                     std::size_t window, double bg_fraction, std::uint64_t seed);

struct Batch {
  numerics::Tensor features;  // [N x T x D]
  std::vector<float> mask;    // [N x T]
  std::vector<labeling::FrameSupervision> supervision;
  std::vector<float> video_labels;  // [N x C]
  std::vector<std::string> ids;

  std::size_t size() const noexcept { return ids.size(); }
  Example example(std::size_t i) const;
};

// Reads the listed videos (IoError naming the path on failure) and stacks
// them into one zero-padded batch.
Batch make_batch(const synthdata::Manifest& manifest, std::span<const std::size_t> videos,
                 std::size_t window, double bg_fraction, std::uint64_t seed);

// Loss of one video and its gradient accumulated into params, scaled by
// `weight`.
losses::LossBreakdown accumulate_example(model::ModelParams& params, const Example& example,
                                         const TrainConfig& config, float weight);

struct TrainingRun {
  model::ModelParams params;
  std::size_t steps = 0;
  std::vector<losses::LossBreakdown> history;  // batch mean per step
  std::vector<std::filesystem::path> checkpoints;
};

// Trains on the manifest. With a non-empty out_dir, writes
// checkpoints/epoch_<n>.c2fck after every epoch, model.c2fck at the end and
// train_log.jsonl with one line per step.
// `progress` receives one line per epoch.
using ProgressFn = std::function<void(const std::string&)>;

TrainingRun train(const TrainConfig& config, const synthdata::Manifest& manifest,
                  const std::filesystem::path& out_dir = {}, const ProgressFn& progress = {});

struct ArmResult {
  Mode mode = Mode::kFull;
  std::filesystem::path checkpoint;
  eval::EvalReport first_occurrence;
  std::optional<eval::EvalReport> all_occurrence;
};

// Trains and evaluates the three arms with the same seed and corpus. Each
// arm writes into out_dir/<arm>/ when out_dir is set.
std::vector<ArmResult> ablate(const TrainConfig& config, const synthdata::Manifest& train_set,
                              const synthdata::Manifest& test_set,
                              const inference::InferenceConfig& inference_config,
                              const std::filesystem::path& out_dir = {},
                              std::span<const Mode> modes = {},
                              const ProgressFn& progress = {});

std::string ablation_table(const std::vector<ArmResult>& arms);
std::string ablation_to_json(const std::vector<ArmResult>& arms);

}  // namespace c2f::trainer
