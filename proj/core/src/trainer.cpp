#include "c2f/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "c2f/binary_io.hpp"
#include "c2f/errors.hpp"
#include "c2f/model/checkpoint.hpp"
#include "c2f/numerics/adam.hpp"
#include "c2f/parallel.hpp"
#include "c2f/rng.hpp"
#include "c2f/synthdata/feature_io.hpp"

namespace c2f::trainer {

using numerics::Shape;
using numerics::Tensor;

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kFO:
      return "FO";
    case Mode::kFOVL:
      return "FO+VL";
    case Mode::kFull:
      break;
  }
  return "FO+VL+PD";
}

Mode parse_mode(const std::string& name) {
  if (name == "FO") return Mode::kFO;
  if (name == "FO+VL") return Mode::kFOVL;
  if (name == "FO+VL+PD") return Mode::kFull;
  throw ConfigError("unknown mode '" + name + "' (expected FO, FO+VL or FO+VL+PD)");
}

losses::Objective objective_for(Mode mode) {
  switch (mode) {
    case Mode::kFO:
      return losses::Objective::kFirstOccurrence;
    case Mode::kFOVL:
      return losses::Objective::kFirstOccurrenceVideo;
    case Mode::kFull:
      break;
  }
  return losses::Objective::kDecomposed;
}

model::HeadLayout heads_for(Mode mode) {
  return mode == Mode::kFull ? model::HeadLayout::kDecomposed : model::HeadLayout::kSingle;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(learning_rate > 0.0f)) throw ConfigError("train.learning_rate must be > 0");
  if (!(bg_fraction >= 0.0 && bg_fraction <= 1.0)) {
    throw ConfigError("train.bg_fraction must be in [0, 1]");
  }
  loss.validate();
  model.validate();
  if (model.heads != heads_for(mode)) {
    throw ConfigError("model head layout does not match mode " + mode_name(mode));
  }
}

TrainConfig TrainConfig::full_scale_preset() {
  TrainConfig c;
  c.batch_size = 16;
  c.learning_rate = 1e-5f;
  c.model.max_frames = 3600;
  c.model.hidden = {1024, 512};
  return c;
}

Example make_example(const synthdata::Manifest& manifest, const synthdata::VideoEntry& video,
                     std::size_t window, double bg_fraction, std::uint64_t seed) {
  const auto path = manifest.feature_path(video);
  const Tensor raw = synthdata::read_features(path);
  if (raw.dim(0) != video.length || raw.dim(1) != manifest.feature_dim) {
    throw DimensionError(path.string() + ": features are " + numerics::to_string(raw.shape()) +
                         ", manifest says [" + std::to_string(video.length) + ", " +
                         std::to_string(manifest.feature_dim) + "]");
  }
  const std::size_t dim = manifest.feature_dim;
  const std::size_t classes = manifest.num_classes;
  const std::size_t keep = std::min(video.length, window);

  Example ex;
  ex.id = video.id;
  ex.features = Tensor(Shape{window, dim});
  std::copy_n(raw.data(), keep * dim, ex.features.data());
  ex.mask.assign(window, 0.0f);
  std::fill_n(ex.mask.begin(), keep, 1.0f);

  // Supervise at full length, then cut: candidacy depends on the earliest
  // labeled start even when it lies past the window.
  const labeling::FrameSupervision full = labeling::derive_supervision(
      video.first_occurrences, video.length, classes, bg_fraction,
      derive_seed(seed, "negatives/" + video.id));
  labeling::FrameSupervision& s = ex.supervision;
  s.frames = window;
  s.num_classes = classes;
  s.is_bg_only = full.is_bg_only;
  s.fg_labels.assign(window, 0.0f);
  s.fg_label_mask.assign(window, 0.0f);
  s.fg_frame_mask.assign(window, 0.0f);
  s.cond_labels.assign(window * classes, 0.0f);
  std::copy_n(full.fg_labels.begin(), keep, s.fg_labels.begin());
  std::copy_n(full.fg_label_mask.begin(), keep, s.fg_label_mask.begin());
  std::copy_n(full.fg_frame_mask.begin(), keep, s.fg_frame_mask.begin());
  std::copy_n(full.cond_labels.begin(), keep * classes, s.cond_labels.begin());

  ex.video_labels.assign(classes, 0.0f);
  for (std::size_t c = 0; c < classes && c < video.labels.size(); ++c) {
    ex.video_labels[c] = video.labels[c] != 0 ? 1.0f : 0.0f;
  }
  return ex;
}

Example Batch::example(std::size_t i) const {
  const std::size_t window = features.dim(1);
  const std::size_t dim = features.dim(2);
  const std::size_t classes = video_labels.size() / size();
  Example ex;
  ex.id = ids[i];
  ex.features = Tensor(Shape{window, dim});
  std::copy_n(features.data() + i * window * dim, window * dim, ex.features.data());
  ex.mask.assign(mask.begin() + static_cast<std::ptrdiff_t>(i * window),
                 mask.begin() + static_cast<std::ptrdiff_t>((i + 1) * window));
  ex.supervision = supervision[i];
  ex.video_labels.assign(video_labels.begin() + static_cast<std::ptrdiff_t>(i * classes),
                         video_labels.begin() + static_cast<std::ptrdiff_t>((i + 1) * classes));
  return ex;
}

Batch make_batch(const synthdata::Manifest& manifest, std::span<const std::size_t> videos,
                 std::size_t window, double bg_fraction, std::uint64_t seed) {
  std::vector<Example> examples(videos.size());
  parallel_for(videos.size(), [&](std::size_t i) {
    examples[i] =
        make_example(manifest, manifest.videos.at(videos[i]), window, bg_fraction, seed);
  });
  const std::size_t dim = manifest.feature_dim;
  Batch b;
  b.features = Tensor(Shape{videos.size(), window, dim});
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    std::copy_n(ex.features.data(), window * dim, b.features.data() + i * window * dim);
    b.mask.insert(b.mask.end(), ex.mask.begin(), ex.mask.end());
    b.video_labels.insert(b.video_labels.end(), ex.video_labels.begin(), ex.video_labels.end());
    b.supervision.push_back(ex.supervision);
    b.ids.push_back(ex.id);
  }
  return b;
}

losses::LossBreakdown accumulate_example(model::ModelParams& params, const Example& example,
                                         const TrainConfig& config, float weight) {
  numerics::Tape tape;
  const model::ScoreGraph scores = model::build_scores(tape, params, example.features, example.mask);
  const labeling::FrameSupervision& s = example.supervision;
  const losses::VideoTargets targets{example.mask,    s.fg_labels,           s.fg_label_mask,
                                     s.cond_labels,   s.fg_frame_mask,       example.video_labels,
                                     s.is_bg_only};
  const losses::LossGraph g =
      losses::total_loss(tape, scores, targets, config.loss, objective_for(config.mode));
  const losses::LossBreakdown values = g.values(tape);
  tape.backward(g.total, weight);
  return values;
}

namespace {

std::string checkpoint_name(std::size_t epoch) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "checkpoints/epoch_%03zu.c2fck", epoch);
  return buf;
}

std::string log_line(std::size_t epoch, std::size_t step, const losses::LossBreakdown& b) {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["step"] = step;
  j["total"] = b.total;
  j["video"] = b.video;
  j["foreground"] = b.foreground;
  j["ce"] = b.ce;
  j["bg_only"] = b.bg_only;
  j["laplacian"] = b.laplacian;
  j["cs"] = b.cs;
  return j.dump() + "\n";
}

}  // namespace

TrainingRun train(const TrainConfig& config, const synthdata::Manifest& manifest,
                  const std::filesystem::path& out_dir, const ProgressFn& progress) {
  config.validate();
  const model::ModelConfig& mc = config.model;
  if (manifest.feature_dim != mc.feature_dim || manifest.num_classes != mc.num_classes) {
    throw ConfigError("train manifest has feature_dim=" + std::to_string(manifest.feature_dim) +
                      ", num_classes=" + std::to_string(manifest.num_classes) +
                      " but model.feature_dim=" + std::to_string(mc.feature_dim) +
                      ", model.num_classes=" + std::to_string(mc.num_classes));
  }
  if (manifest.videos.empty()) {
    throw ConfigError("train manifest lists no videos");
  }

  TrainingRun run;
  run.params = model::init_params(mc, derive_seed(config.seed, "init"));

  std::vector<std::size_t> all(manifest.videos.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<Example> examples(all.size());
  parallel_for(all.size(), [&](std::size_t i) {
    examples[i] = make_example(manifest, manifest.videos[i], mc.max_frames, config.bg_fraction,
                               config.seed);
  });

  std::string log;
  numerics::AdamState adam(numerics::AdamOptions{config.learning_rate});
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::size_t> order = all;
    Rng rng(derive_seed(config.seed, "epoch/" + std::to_string(epoch)));
    rng.shuffle(std::span<std::size_t>(order));

    double epoch_total = 0.0;
    std::size_t epoch_steps = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const float weight = 1.0f / static_cast<float>(e - b);
      run.params.zero_grad();
      std::vector<losses::LossBreakdown> per_video;
      for (std::size_t i = b; i < e; ++i) {
        const Example& ex = examples[order[i]];
        try {
          per_video.push_back(accumulate_example(run.params, ex, config, weight));
        } catch (const NonFiniteError& err) {
          throw NonFiniteError("epoch " + std::to_string(epoch) + ", step " +
                               std::to_string(run.steps + 1) + ", video " + ex.id + ": " +
                               err.what());
        }
      }
      const losses::LossBreakdown mean = losses::batch_mean(per_video);
      const auto named = run.params.named();
      adam.step(named);
      ++run.steps;
      run.history.push_back(mean);
      epoch_total += mean.total;
      ++epoch_steps;
      log += log_line(epoch, run.steps, mean);
    }

    if (!out_dir.empty()) {
      const auto path = out_dir / checkpoint_name(epoch);
      model::save_checkpoint(run.params, path);
      run.checkpoints.push_back(path);
    }
    if (progress) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "epoch %zu/%zu  mean loss %.5f", epoch, config.epochs,
                    epoch_total / static_cast<double>(std::max<std::size_t>(1, epoch_steps)));
      progress(buf);
    }
  }

  if (!out_dir.empty()) {
    model::save_checkpoint(run.params, out_dir / "model.c2fck");
    binary::write_file(out_dir / "train_log.jsonl", log);
  }
  return run;
}

namespace {

std::string arm_dir(Mode mode) {
  switch (mode) {
    case Mode::kFO:
      return "fo";
    case Mode::kFOVL:
      return "fo_vl";
    case Mode::kFull:
      break;
  }
  return "fo_vl_pd";
}

}  // namespace

std::vector<ArmResult> ablate(const TrainConfig& config, const synthdata::Manifest& train_set,
                              const synthdata::Manifest& test_set,
                              const inference::InferenceConfig& inference_config,
                              const std::filesystem::path& out_dir, std::span<const Mode> modes,
                              const ProgressFn& progress) {
  static constexpr Mode kAll[] = {Mode::kFO, Mode::kFOVL, Mode::kFull};
  if (modes.empty()) {
    modes = kAll;
  }
  std::vector<ArmResult> results;
  for (const Mode mode : modes) {
    TrainConfig arm = config;
    arm.mode = mode;
    arm.model.heads = heads_for(mode);
    const std::filesystem::path dir = out_dir.empty() ? out_dir : out_dir / arm_dir(mode);
    ProgressFn arm_progress;
    if (progress) {
      arm_progress = [&](const std::string& line) { progress(mode_name(mode) + ": " + line); };
    }
    const TrainingRun run = train(arm, train_set, dir, arm_progress);
    const auto preds = inference::run_inference(run.params, test_set, inference_config);

    ArmResult r;
    r.mode = mode;
    r.first_occurrence = eval::evaluate(preds, test_set, eval::Protocol::kFirstOccurrence);
    if (test_set.has_segments()) {
      r.all_occurrence = eval::evaluate(preds, test_set, eval::Protocol::kAllOccurrence);
    }
    if (!dir.empty()) {
      r.checkpoint = dir / "model.c2fck";
      inference::save_predictions(preds, dir / "predictions.json");
      binary::write_file(dir / "report_first-occurrence.json",
                         eval::report_to_json(r.first_occurrence));
      if (r.all_occurrence) {
        binary::write_file(dir / "report_all-occurrence.json",
                           eval::report_to_json(*r.all_occurrence));
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

std::string pct(const std::optional<double>& x) {
  char buf[16];
  if (x) {
    std::snprintf(buf, sizeof buf, "%7.1f", *x * 100.0);
  } else {
    std::snprintf(buf, sizeof buf, "%7s", "-");
  }
  return buf;
}

void table_rows(std::string& out, const std::vector<ArmResult>& arms, bool all) {
  char buf[64];
  for (const auto& a : arms) {
    const eval::EvalReport* r = all ? (a.all_occurrence ? &*a.all_occurrence : nullptr)
                                    : &a.first_occurrence;
    if (r == nullptr) {
      continue;
    }
    std::snprintf(buf, sizeof buf, "%-10s", mode_name(a.mode).c_str());
    out += buf;
    for (const auto& m : r->map) {
      out += pct(m);
    }
    out += pct(r->average_map) + "\n";
  }
}

}  // namespace

std::string ablation_table(const std::vector<ArmResult>& arms) {
  std::string out;
  for (const bool all : {false, true}) {
    if (all && (arms.empty() || !arms.front().all_occurrence)) {
      break;
    }
    out += all ? "all-occurrence\n" : "first-occurrence\n";
    out += "mAP@IoU       0.0    0.1    0.2    AVG\n";
    table_rows(out, arms, all);
  }
  return out;
}

std::string ablation_to_json(const std::vector<ArmResult>& arms) {
  nlohmann::ordered_json doc;
  doc["format"] = "c2f-ablation";
  auto& arr = doc["arms"] = nlohmann::ordered_json::array();
  for (const auto& a : arms) {
    nlohmann::ordered_json j;
    j["mode"] = mode_name(a.mode);
    j["checkpoint"] = a.checkpoint.generic_string();
    j["first_occurrence"] = nlohmann::ordered_json::parse(eval::report_to_json(a.first_occurrence));
    if (a.all_occurrence) {
      j["all_occurrence"] = nlohmann::ordered_json::parse(eval::report_to_json(*a.all_occurrence));
    }
    arr.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace c2f::trainer
