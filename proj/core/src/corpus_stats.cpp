#include "c2f/synthdata/corpus_stats.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "c2f/errors.hpp"
#include "c2f/synthdata/feature_io.hpp"

namespace c2f::synthdata {

namespace {

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

void check_feature_files(const Manifest& manifest) {
  std::string problems;
  std::size_t bad = 0;
  for (const auto& v : manifest.videos) {
    const auto path = manifest.feature_path(v);
    std::string why;
    try {
      const FeatureHeader h = read_feature_header(path);
      if (h.frames != v.length || h.feature_dim != manifest.feature_dim) {
        why = "header " + std::to_string(h.frames) + "x" + std::to_string(h.feature_dim) +
              ", manifest " + std::to_string(v.length) + "x" +
              std::to_string(manifest.feature_dim);
      }
    } catch (const IoError& e) {
      why = e.what();
    }
    if (!why.empty()) {
      ++bad;
      problems += "\n  " + path.string() + ": " + why;
    }
  }
  if (bad > 0) {
    throw IoError(std::to_string(bad) + " unusable feature file(s):" + problems);
  }
}

}  // namespace

CorpusStats corpus_stats(const Manifest& manifest, bool check_files) {
  if (check_files) {
    check_feature_files(manifest);
  }
  const std::size_t classes = manifest.num_classes;
  CorpusStats s;
  s.exhaustive = manifest.has_segments();
  std::vector<std::size_t> class_frames(classes, 0);
  for (const auto& v : manifest.videos) {
    std::vector<Segment> segs;
    if (v.segments) {
      segs = *v.segments;
    } else {
      for (const auto& a : v.first_occurrences) {
        segs.push_back({a.class_id, a.start, a.end});
      }
    }
    ++s.videos;
    s.bg_only_videos += segs.empty() ? 1 : 0;
    s.total_frames += v.length;
    std::vector<char> fg(v.length, 0);
    for (const auto& seg : segs) {
      class_frames[seg.class_id] += seg.end - seg.start;
      std::fill(fg.begin() + static_cast<std::ptrdiff_t>(seg.start),
                fg.begin() + static_cast<std::ptrdiff_t>(seg.end), 1);
    }
    s.foreground_frames += static_cast<std::size_t>(std::count(fg.begin(), fg.end(), 1));
  }
  s.fg_percent = percent(s.foreground_frames, s.total_frames);
  double ratio_sum = 0.0;
  std::size_t ratio_count = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    ClassPresence p;
    p.name = c < manifest.class_names.size() ? manifest.class_names[c] : "class" + std::to_string(c);
    p.frames = class_frames[c];
    p.all_percent = percent(p.frames, s.total_frames);
    p.fg_percent = percent(p.frames, s.foreground_frames);
    if (p.frames > 0) {
      p.improvement = p.fg_percent / p.all_percent;
      ratio_sum += p.improvement;
      ++ratio_count;
    }
    s.classes.push_back(std::move(p));
  }
  s.mean_improvement = ratio_count == 0 ? 0.0 : ratio_sum / static_cast<double>(ratio_count);
  return s;
}

std::string stats_to_json(const CorpusStats& s) {
  nlohmann::ordered_json doc;
  doc["exhaustive"] = s.exhaustive;
  doc["videos"] = s.videos;
  doc["bg_only_videos"] = s.bg_only_videos;
  doc["total_frames"] = s.total_frames;
  doc["foreground_frames"] = s.foreground_frames;
  doc["fg_percent"] = s.fg_percent;
  doc["mean_improvement"] = s.mean_improvement;
  auto& arr = doc["classes"] = nlohmann::ordered_json::array();
  for (const auto& c : s.classes) {
    arr.push_back({{"name", c.name},
                   {"frames", c.frames},
                   {"all_percent", c.all_percent},
                   {"fg_percent", c.fg_percent},
                   {"improvement", c.improvement}});
  }
  return doc.dump(2) + "\n";
}

std::string stats_table(const CorpusStats& s) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "videos %zu (background-only %zu), frames %zu%s\n", s.videos,
                s.bg_only_videos, s.total_frames,
                s.exhaustive ? "" : "  [first occurrences only]");
  out += line;
  std::snprintf(line, sizeof line, "%-12s %10s %10s %10s %8s\n", "class", "frames", "all %",
                "fg %", "ratio");
  out += line;
  for (const auto& c : s.classes) {
    std::snprintf(line, sizeof line, "%-12s %10zu %10.3f %10.3f %7.1fx\n", c.name.c_str(),
                  c.frames, c.all_percent, c.fg_percent, c.improvement);
    out += line;
  }
  std::snprintf(line, sizeof line, "foreground %zu frames = %.3f%% of all; mean ratio %.1fx\n",
                s.foreground_frames, s.fg_percent, s.mean_improvement);
  out += line;
  return out;
}

}  // namespace c2f::synthdata
