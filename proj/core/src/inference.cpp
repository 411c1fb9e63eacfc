#include "c2f/inference.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include <json.hpp>

#include "c2f/binary_io.hpp"
#include "c2f/errors.hpp"
#include "c2f/parallel.hpp"
#include "c2f/synthdata/feature_io.hpp"

namespace c2f::inference {

using json = nlohmann::ordered_json;

void InferenceConfig::validate() const {
  if (!(video_threshold >= 0.0f && video_threshold <= 1.0f)) {
    throw ConfigError("inference.video_threshold must be in [0, 1]");
  }
  if (!(frame_threshold >= 0.0f && frame_threshold <= 1.0f)) {
    throw ConfigError("inference.frame_threshold must be in [0, 1]");
  }
  if (min_length < 1) {
    throw ConfigError("inference.min_length must be >= 1");
  }
}

std::vector<SegmentPrediction> segments_from_column(const std::vector<float>& scores,
                                                    std::size_t valid,
                                                    const InferenceConfig& config,
                                                    const std::string& video,
                                                    std::size_t class_id) {
  valid = std::min(valid, scores.size());
  std::vector<SegmentPrediction> out;
  std::size_t t = 0;
  while (t < valid) {
    if (scores[t] < config.frame_threshold) {
      ++t;
      continue;
    }
    SegmentPrediction seg{video, class_id, t, t, scores[t]};
    std::size_t last = t;  // last frame at or above threshold
    for (std::size_t u = t; u < valid; ++u) {
      if (scores[u] >= config.frame_threshold) {
        last = u;
        seg.score = std::max(seg.score, scores[u]);
      } else if (u - last > config.merge_gap) {
        break;
      }
    }
    seg.end = last + 1;
    if (seg.end - seg.start >= config.min_length) {
      out.push_back(seg);
    }
    t = seg.end;
  }
  return out;
}

std::vector<SegmentPrediction> propose_segments(const model::ScoreBundle& bundle,
                                                const InferenceConfig& config,
                                                const std::string& video) {
  const std::size_t frames = bundle.action.dim(0);
  const std::size_t classes = bundle.action.dim(1);
  std::vector<SegmentPrediction> out;
  std::vector<float> column(frames);
  for (std::size_t c = 0; c < classes; ++c) {
    if (bundle.video[c] < config.video_threshold) {
      continue;
    }
    for (std::size_t t = 0; t < frames; ++t) {
      column[t] = bundle.action.at(t, c);
    }
    auto segs = segments_from_column(column, bundle.valid_frames, config, video, c);
    out.insert(out.end(), segs.begin(), segs.end());
  }
  return out;
}

void sort_predictions(std::vector<SegmentPrediction>& predictions) {
  std::sort(predictions.begin(), predictions.end(),
            [](const SegmentPrediction& a, const SegmentPrediction& b) {
              return std::tie(a.video, a.class_id, a.start, a.end) <
                     std::tie(b.video, b.class_id, b.start, b.end);
            });
}

model::ScoreBundle score_video(const model::ModelParams& params,
                               const synthdata::Manifest& manifest,
                               const synthdata::VideoEntry& video) {
  const numerics::Tensor features = synthdata::read_features(manifest.feature_path(video));
  if (features.dim(0) != video.length || features.dim(1) != params.config.feature_dim) {
    throw DimensionError(manifest.feature_path(video).string() + ": features are " +
                         numerics::to_string(features.shape()) + ", expected [" +
                         std::to_string(video.length) + ", " +
                         std::to_string(params.config.feature_dim) + "]");
  }
  const std::vector<float> mask(video.length, 1.0f);
  return model::forward(params, features, mask);
}

std::vector<SegmentPrediction> run_inference(const model::ModelParams& params,
                                             const synthdata::Manifest& manifest,
                                             const InferenceConfig& config) {
  config.validate();
  if (manifest.feature_dim != params.config.feature_dim ||
      manifest.num_classes != params.config.num_classes) {
    throw ConfigError("manifest has feature_dim=" + std::to_string(manifest.feature_dim) +
                      ", num_classes=" + std::to_string(manifest.num_classes) +
                      " but the model expects feature_dim=" +
                      std::to_string(params.config.feature_dim) +
                      ", num_classes=" + std::to_string(params.config.num_classes));
  }
  std::vector<std::vector<SegmentPrediction>> per_video(manifest.videos.size());
  parallel_for(manifest.videos.size(), [&](std::size_t i) {
    const auto& v = manifest.videos[i];
    per_video[i] = propose_segments(score_video(params, manifest, v), config, v.id);
  });
  std::vector<SegmentPrediction> out;
  for (auto& p : per_video) {
    out.insert(out.end(), p.begin(), p.end());
  }
  sort_predictions(out);
  return out;
}

std::string score_curves_csv(const model::ScoreBundle& bundle) {
  const std::size_t classes = bundle.action.dim(1);
  std::string out = "frame,foreground";
  for (std::size_t c = 0; c < classes; ++c) {
    out += ",cs" + std::to_string(c);
  }
  for (std::size_t c = 0; c < classes; ++c) {
    out += ",as" + std::to_string(c);
  }
  out += "\n";
  char buf[32];
  for (std::size_t t = 0; t < bundle.valid_frames; ++t) {
    out += std::to_string(t);
    std::snprintf(buf, sizeof buf, ",%.6g", bundle.foreground[t]);
    out += buf;
    for (std::size_t c = 0; c < classes; ++c) {
      std::snprintf(buf, sizeof buf, ",%.6g", bundle.conditional.at(t, c));
      out += buf;
    }
    for (std::size_t c = 0; c < classes; ++c) {
      std::snprintf(buf, sizeof buf, ",%.6g", bundle.action.at(t, c));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string predictions_to_json(const std::vector<SegmentPrediction>& predictions) {
  json doc;
  doc["format"] = "c2f-predictions";
  doc["version"] = 1;
  json arr = json::array();
  for (const auto& p : predictions) {
    arr.push_back(
        {{"video", p.video}, {"class", p.class_id}, {"start", p.start}, {"end", p.end},
         {"score", p.score}});
  }
  doc["predictions"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::vector<SegmentPrediction> predictions_from_json(const std::string& text) {
  std::vector<SegmentPrediction> out;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object() || doc.value("format", "") != "c2f-predictions") {
      throw ValidationError("predictions: missing \"format\": \"c2f-predictions\"");
    }
    for (const auto& j : doc.at("predictions")) {
      SegmentPrediction p;
      p.video = j.at("video").get<std::string>();
      p.class_id = j.at("class").get<std::size_t>();
      p.start = j.at("start").get<std::size_t>();
      p.end = j.at("end").get<std::size_t>();
      p.score = j.at("score").get<float>();
      if (p.start >= p.end) {
        throw ValidationError("predictions: empty segment for video '" + p.video + "'");
      }
      out.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("predictions: malformed document: ") + e.what());
  }
  return out;
}

void save_predictions(const std::vector<SegmentPrediction>& predictions,
                      const std::filesystem::path& path) {
  binary::write_file(path, predictions_to_json(predictions));
}

std::vector<SegmentPrediction> load_predictions(const std::filesystem::path& path) {
  return predictions_from_json(binary::read_file(path));
}

}  // namespace c2f::inference
