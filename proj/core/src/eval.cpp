#include "c2f/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <tuple>

#include <json.hpp>

#include "c2f/errors.hpp"

namespace c2f::eval {

double temporal_iou(std::size_t a_start, std::size_t a_end, std::size_t b_start,
                    std::size_t b_end) {
  const std::size_t lo = std::max(a_start, b_start);
  const std::size_t hi = std::min(a_end, b_end);
  const std::size_t inter = hi > lo ? hi - lo : 0;
  const std::size_t uni = (a_end - a_start) + (b_end - b_start) - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

bool iou_passes(double iou, double threshold) {
  return threshold <= 0.0 ? iou > 0.0 : iou >= threshold;
}

std::optional<double> average_precision(std::vector<RankedSegment> predictions,
                                        const std::vector<TruthSegment>& truth,
                                        double iou_threshold) {
  if (truth.empty()) {
    return predictions.empty() ? std::nullopt : std::optional<double>(0.0);
  }
  std::stable_sort(predictions.begin(), predictions.end(),
                   [](const RankedSegment& a, const RankedSegment& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return std::tie(a.start, a.video, a.end) < std::tie(b.start, b.video, b.end);
                   });
  std::vector<char> matched(truth.size(), 0);
  std::size_t hits = 0;
  double ap = 0.0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const RankedSegment& p = predictions[k];
    double best = -1.0;
    std::size_t best_j = truth.size();
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (matched[j] || truth[j].video != p.video) {
        continue;
      }
      const double iou = temporal_iou(p.start, p.end, truth[j].start, truth[j].end);
      if (iou > best) {
        best = iou;
        best_j = j;
      }
    }
    if (best_j < truth.size() && iou_passes(best, iou_threshold)) {
      matched[best_j] = 1;
      ++hits;
      // Recall steps by 1/|truth| exactly at hits.
      ap += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return ap / static_cast<double>(truth.size());
}

std::string protocol_name(Protocol p) {
  return p == Protocol::kFirstOccurrence ? "first-occurrence" : "all-occurrence";
}

Protocol parse_protocol(const std::string& name) {
  if (name == "first-occurrence") return Protocol::kFirstOccurrence;
  if (name == "all-occurrence") return Protocol::kAllOccurrence;
  throw ConfigError("unknown protocol '" + name +
                    "' (expected first-occurrence or all-occurrence)");
}

namespace {

std::optional<double> mean_defined(const std::vector<std::optional<double>>& xs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  return n == 0 ? std::nullopt : std::optional<double>(sum / static_cast<double>(n));
}

}  // namespace

EvalReport evaluate(const std::vector<inference::SegmentPrediction>& predictions,
                    const synthdata::Manifest& manifest, Protocol protocol) {
  const std::size_t classes = manifest.num_classes;
  if (protocol == Protocol::kAllOccurrence && !manifest.has_segments()) {
    throw ValidationError("all-occurrence evaluation needs segments for every video in the "
                          "manifest (split '" + manifest.split + "')");
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < manifest.videos.size(); ++i) {
    index.emplace(manifest.videos[i].id, i);
  }

  std::vector<std::vector<RankedSegment>> preds(classes);
  std::vector<std::vector<TruthSegment>> truth(classes);
  EvalReport report;
  report.protocol = protocol;

  // Truncation point per (video, class); 0 means no first occurrence.
  std::vector<std::size_t> cutoff(manifest.videos.size() * classes, 0);
  for (std::size_t i = 0; i < manifest.videos.size(); ++i) {
    const auto& v = manifest.videos[i];
    if (protocol == Protocol::kFirstOccurrence) {
      for (const auto& a : v.first_occurrences) {
        cutoff[i * classes + a.class_id] = a.end;
        truth[a.class_id].push_back({i, a.start, a.end});
      }
    } else {
      for (const auto& s : *v.segments) {
        truth[s.class_id].push_back({i, s.start, s.end});
      }
    }
  }

  for (const auto& p : predictions) {
    const auto it = index.find(p.video);
    if (it == index.end()) {
      throw ValidationError("prediction references unknown video '" + p.video + "'");
    }
    if (p.class_id >= classes) {
      throw ValidationError("prediction for video '" + p.video + "' has class " +
                            std::to_string(p.class_id) + " (C=" + std::to_string(classes) + ")");
    }
    RankedSegment r{it->second, p.start, p.end, p.score};
    if (protocol == Protocol::kFirstOccurrence) {
      const std::size_t t = cutoff[it->second * classes + p.class_id];
      if (t > 0) {
        if (r.start >= t) {
          continue;
        }
        r.end = std::min(r.end, t);
      }
    }
    preds[p.class_id].push_back(r);
    ++report.predictions_used;
  }

  report.class_names = manifest.class_names;
  report.class_names.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (report.class_names[c].empty()) report.class_names[c] = "class" + std::to_string(c);
    report.ground_truth += truth[c].size();
    std::vector<std::optional<double>> row;
    for (const double thr : report.thresholds) {
      row.push_back(average_precision(preds[c], truth[c], thr));
    }
    report.class_average.push_back(mean_defined(row));
    report.ap.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
    std::vector<std::optional<double>> column;
    for (std::size_t c = 0; c < classes; ++c) {
      column.push_back(report.ap[c][k]);
    }
    report.map.push_back(mean_defined(column));
  }
  report.average_map = mean_defined(report.map);
  return report;
}

namespace {

nlohmann::ordered_json percent_or_null(const std::optional<double>& x) {
  return x ? nlohmann::ordered_json(*x * 100.0) : nlohmann::ordered_json(nullptr);
}

std::string cell(const std::optional<double>& x) {
  char buf[16];
  if (x) {
    std::snprintf(buf, sizeof buf, "%7.1f", *x * 100.0);
  } else {
    std::snprintf(buf, sizeof buf, "%7s", "-");
  }
  return buf;
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json doc;
  doc["format"] = "c2f-eval";
  doc["protocol"] = protocol_name(r.protocol);
  doc["iou_thresholds"] = r.thresholds;
  auto& cls = doc["classes"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < r.ap.size(); ++c) {
    nlohmann::ordered_json row;
    row["name"] = r.class_names[c];
    auto& ap = row["ap"] = nlohmann::ordered_json::array();
    for (const auto& x : r.ap[c]) {
      ap.push_back(percent_or_null(x));
    }
    row["average"] = percent_or_null(r.class_average[c]);
    cls.push_back(std::move(row));
  }
  auto& map = doc["map"] = nlohmann::ordered_json::array();
  for (const auto& x : r.map) {
    map.push_back(percent_or_null(x));
  }
  doc["average_map"] = percent_or_null(r.average_map);
  doc["predictions_used"] = r.predictions_used;
  doc["ground_truth"] = r.ground_truth;
  return doc.dump(2) + "\n";
}

std::string report_table(const EvalReport& r) {
  std::string out = "protocol: " + protocol_name(r.protocol) + "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-12s", "mAP@IoU");
  out += buf;
  for (const double t : r.thresholds) {
    std::snprintf(buf, sizeof buf, "%7.1f", t);
    out += buf;
  }
  out += "    AVG\n";
  for (std::size_t c = 0; c < r.ap.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%-12s", r.class_names[c].c_str());
    out += buf;
    for (const auto& x : r.ap[c]) {
      out += cell(x);
    }
    out += cell(r.class_average[c]) + "\n";
  }
  std::snprintf(buf, sizeof buf, "%-12s", "mean");
  out += buf;
  for (const auto& x : r.map) {
    out += cell(x);
  }
  out += cell(r.average_map) + "\n";
  return out;
}

}  // namespace c2f::eval
