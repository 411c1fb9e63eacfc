#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "c2f/numerics/tensor.hpp"
#include "c2f/synthdata/manifest.hpp"

namespace c2f::synthdata {

struct CorpusConfig {
  std::size_t train_videos = 200;
  std::size_t test_videos = 50;
  std::size_t frames = 240;
  std::size_t feature_dim = 32;
  std::size_t num_classes = 4;
  // Fraction of all frames covered by each class.
  std::vector<double> presence = {0.008, 0.002, 0.013, 0.007};
  std::vector<double> mean_duration = {23.0, 19.0, 28.0, 19.0};
  double separation = 4.0;
  double noise = 1.0;
  // Chance that a new segment is placed overlapping another class's segment.
  double cooccurrence = 0.45;
  // Chance that a class's next segment goes to a video that already has it.
  double repeat = 0.4;
  // Videos reserved to carry no segment. Others may still end up empty.
  double bg_only_fraction = 0.35;
  // Background is a sequence of scenes drawn from a shared pool.
  std::size_t scene_count = 8;
  double scene_run = 40.0;
  // Weight of one direction common to every class prototype.
  double shared_foreground = 0.0;
  // Scenes that mix in a class's own direction; they only ever appear in
  // segment-free videos.
  std::size_t confuser_scenes = 0;
  double confuser_mix = 0.0;
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError
};

struct Prototypes {
  std::vector<numerics::Tensor> classes;  // each [D]
  std::vector<numerics::Tensor> specific; // unit class directions without the shared part
  std::vector<numerics::Tensor> scenes;   // ordinary scenes, then confusers
};

struct VideoPlan {
  std::string id;
  std::size_t length = 0;
  bool reserved_bg = false;
  std::vector<Segment> segments;  // sorted by (start, class)
};

struct SyntheticVideo {
  VideoPlan plan;
  numerics::Tensor features;  // [T x D]
  std::vector<int> labels;
  std::vector<labeling::FirstOccurrence> first_occurrences;  // ordered by class
};

// Frame counts gathered while generating; corpus_stats must reproduce them.
struct GenerationCounters {
  std::size_t videos = 0;
  std::size_t bg_only_videos = 0;
  std::size_t total_frames = 0;
  std::size_t foreground_frames = 0;
  std::vector<std::size_t> class_frames;

  void add(const VideoPlan& plan, std::size_t num_classes);
};

Prototypes make_prototypes(const CorpusConfig& config);

// Segment layout for one split. Per-class frame totals are exact:
// round(presence * videos * frames).
std::vector<VideoPlan> plan_split(const CorpusConfig& config, const std::string& split,
                                  std::size_t videos);

SyntheticVideo render_video(const CorpusConfig& config, const Prototypes& prototypes,
                            const VideoPlan& plan);

std::vector<labeling::FirstOccurrence> first_occurrences_of(const std::vector<Segment>& segments,
                                                            std::size_t num_classes);

struct CorpusSummary {
  Manifest train;
  Manifest test;
  Manifest truth;  // every video of both splits with all segments
  GenerationCounters counters;
};

// Writes <out>/features/<id>.c2fv, train.json, test.json and truth.json.
CorpusSummary write_corpus(const CorpusConfig& config, const std::filesystem::path& out_dir);

std::vector<std::string> default_class_names(std::size_t num_classes);

}  // namespace c2f::synthdata
