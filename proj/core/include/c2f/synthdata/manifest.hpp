#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "c2f/labeling.hpp"

namespace c2f::synthdata {

// One action instance, frames [start, end).
struct Segment {
  std::size_t class_id = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct VideoEntry {
  std::string id;
  std::string path;  // feature file, relative to the manifest's directory
  std::size_t length = 0;
  std::vector<int> labels;  // [C] video-level 0/1
  std::vector<labeling::FirstOccurrence> first_occurrences;
  // Exhaustive ground truth; only present in test and truth manifests.
  std::optional<std::vector<Segment>> segments;
};

// JSON document:
// {
//   "format": "c2f-manifest", "version": 1, "split": "train",
//   "feature_dim": 32, "num_classes": 4, "class_names": [...],
//   "videos": [ { "id", "path", "length", "labels": [0,1,..],
//                 "first_occurrences": [{"class","start","end"}],
//                 "segments": [{"class","start","end"}]   (optional) } ]
// }
struct Manifest {
  std::string split;
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
  std::vector<std::string> class_names;
  std::vector<VideoEntry> videos;

  // Directory the manifest was loaded from; feature paths resolve against it.
  std::filesystem::path base_dir;

  std::filesystem::path feature_path(const VideoEntry& video) const;
  const VideoEntry* find(const std::string& id) const;
  bool has_segments() const;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text, const std::filesystem::path& base_dir);

void save_manifest(const Manifest& manifest, const std::filesystem::path& path);
// Throws IoError when unreadable, ConfigError when the document is invalid.
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace c2f::synthdata
