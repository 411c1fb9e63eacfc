#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "c2f/model/model.hpp"
#include "c2f/synthdata/manifest.hpp"

namespace c2f::inference {

struct InferenceConfig {
  float video_threshold = 0.1f;  // classes with y_c below this emit nothing
  float frame_threshold = 0.2f;  // AS[t, c] >= this marks a candidate frame
  std::size_t min_length = 1;    // shorter segments are dropped
  std::size_t merge_gap = 1;     // runs separated by <= this many frames merge

  void validate() const;  // ConfigError
};

// Frames [start, end) of one class in one video; score is the maximum action
// score inside the segment.
struct SegmentPrediction {
  std::string video;
  std::size_t class_id = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  float score = 0.0f;

  friend bool operator==(const SegmentPrediction&, const SegmentPrediction&) = default;
};

// Maximal runs of one score column at or above the threshold, merged across
// short gaps and filtered by length. Only the first `valid` entries count.
std::vector<SegmentPrediction> segments_from_column(const std::vector<float>& scores,
                                                    std::size_t valid,
                                                    const InferenceConfig& config,
                                                    const std::string& video,
                                                    std::size_t class_id);

// Segments for every class whose video score passes the class gate.
std::vector<SegmentPrediction> propose_segments(const model::ScoreBundle& bundle,
                                                const InferenceConfig& config,
                                                const std::string& video);

// Orders by (video, class, start).
void sort_predictions(std::vector<SegmentPrediction>& predictions);

// Scores every video of the manifest at its full length. Throws ConfigError
// when the manifest's feature_dim or num_classes disagree with the model.
std::vector<SegmentPrediction> run_inference(const model::ModelParams& params,
                                             const synthdata::Manifest& manifest,
                                             const InferenceConfig& config);

// Scores of one video: masks all-valid at the file's own length.
model::ScoreBundle score_video(const model::ModelParams& params,
                               const synthdata::Manifest& manifest,
                               const synthdata::VideoEntry& video);

// Per-frame F, CS and AS columns as CSV, one row per real frame.
std::string score_curves_csv(const model::ScoreBundle& bundle);

// {"format": "c2f-predictions", "version": 1,
//  "predictions": [{"video", "class", "start", "end", "score"}]}
std::string predictions_to_json(const std::vector<SegmentPrediction>& predictions);
std::vector<SegmentPrediction> predictions_from_json(const std::string& text);
void save_predictions(const std::vector<SegmentPrediction>& predictions,
                      const std::filesystem::path& path);
std::vector<SegmentPrediction> load_predictions(const std::filesystem::path& path);

}  // namespace c2f::inference
