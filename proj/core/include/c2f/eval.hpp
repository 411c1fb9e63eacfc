#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "c2f/inference.hpp"
#include "c2f/synthdata/manifest.hpp"

namespace c2f::eval {

// |a ∩ b| / |a ∪ b| for half-open frame intervals; 0 when both are empty.
double temporal_iou(std::size_t a_start, std::size_t a_end, std::size_t b_start,
                    std::size_t b_end);

struct RankedSegment {
  std::size_t video = 0;  // any key; matching only happens within one video
  std::size_t start = 0;
  std::size_t end = 0;
  double score = 0.0;
};

struct TruthSegment {
  std::size_t video = 0;
  std::size_t start = 0;
  std::size_t end = 0;
};

// A prediction matches at threshold 0 when IoU > 0, otherwise when
// IoU >= threshold.
bool iou_passes(double iou, double threshold);

// Predictions are ranked by score (ties: earlier start, then video, then
// end); each takes the unmatched ground truth of its video with the highest
// IoU and is a hit when that IoU passes. AP = sum over ranks of
// (R_k - R_{k-1}) * P_k. Empty ground truth gives 0 with predictions and
// nullopt without.
std::optional<double> average_precision(std::vector<RankedSegment> predictions,
                                        const std::vector<TruthSegment>& truth,
                                        double iou_threshold);

enum class Protocol { kFirstOccurrence, kAllOccurrence };

std::string protocol_name(Protocol p);
Protocol parse_protocol(const std::string& name);  // ConfigError

inline const std::vector<double> kIouThresholds = {0.0, 0.1, 0.2};

// AP values are fractions in [0, 1]; the text and JSON forms print x100.
struct EvalReport {
  Protocol protocol = Protocol::kAllOccurrence;
  std::vector<double> thresholds = kIouThresholds;
  std::vector<std::string> class_names;
  std::vector<std::vector<std::optional<double>>> ap;  // [class][threshold]
  std::vector<std::optional<double>> class_average;    // mean over thresholds
  std::vector<std::optional<double>> map;              // [threshold], over defined classes
  std::optional<double> average_map;                   // mean of map
  std::size_t predictions_used = 0;
  std::size_t ground_truth = 0;
};

// First-occurrence protocol, per (video, class): with a labeled first
// occurrence ending at t the truth is that interval, predictions starting
// at or after t are dropped and the rest clipped to [0, t); without one the
// truth is empty and predictions are kept. All-occurrence uses every
// segment and needs them in the manifest. Unknown videos or classes in the
// predictions throw ValidationError.
EvalReport evaluate(const std::vector<inference::SegmentPrediction>& predictions,
                    const synthdata::Manifest& manifest, Protocol protocol);

std::string report_to_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

}  // namespace c2f::eval
