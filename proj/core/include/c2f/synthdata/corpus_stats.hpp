#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "c2f/synthdata/manifest.hpp"

namespace c2f::synthdata {

struct ClassPresence {
  std::string name;
  std::size_t frames = 0;
  double all_percent = 0.0;  // of all frames
  double fg_percent = 0.0;   // of foreground frames
  double improvement = 0.0;  // fg_percent / all_percent, 0 when absent
};

struct CorpusStats {
  // False when the manifest only carries first occurrences; the counts then
  // cover labeled instances only.
  bool exhaustive = true;
  std::size_t videos = 0;
  std::size_t bg_only_videos = 0;
  std::size_t total_frames = 0;
  std::size_t foreground_frames = 0;
  double fg_percent = 0.0;
  double mean_improvement = 0.0;
  std::vector<ClassPresence> classes;
};

// Per-class presence over all frames and over foreground frames. Every
// feature file is checked against the manifest; missing or mismatched files
// are reported together in one IoError.
CorpusStats corpus_stats(const Manifest& manifest, bool check_files = true);

std::string stats_to_json(const CorpusStats& stats);
std::string stats_table(const CorpusStats& stats);

}  // namespace c2f::synthdata
