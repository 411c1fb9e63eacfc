#include "c2f/synthdata/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "c2f/errors.hpp"
#include "c2f/parallel.hpp"
#include "c2f/rng.hpp"
#include "c2f/synthdata/feature_io.hpp"

namespace c2f::synthdata {

using numerics::Shape;
using numerics::Tensor;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ConfigError("corpus: " + what);
  }
}

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

Tensor random_direction(Rng& rng, std::size_t dim) {
  Tensor v(Shape{dim});
  double norm = 0.0;
  while (norm < 1e-6) {
    norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double x = rng.normal();
      v[d] = static_cast<float>(x);
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  for (std::size_t d = 0; d < dim; ++d) {
    v[d] = static_cast<float>(v[d] / norm);
  }
  return v;
}

Tensor scaled(const Tensor& v, double s) {
  Tensor out(v.shape());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(v[i] * s);
  }
  return out;
}

std::string video_id(const std::string& split, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu", split.c_str(), i);
  return buf;
}

// Half-open intervals that overlap, or touch when `touching` is set.
bool collides(const Segment& a, std::size_t start, std::size_t end, bool touching) {
  return touching ? (start <= a.end && a.start <= end) : (start < a.end && a.start < end);
}

std::size_t draw_duration(Rng& rng, double mean, std::size_t frames) {
  // Integer jitter around the class mean: mean * (0.5 + Exp(0.5)).
  const double jitter = 0.5 - 0.5 * std::log(1.0 - rng.uniform());
  const auto d = static_cast<std::size_t>(std::llround(mean * jitter));
  return std::clamp<std::size_t>(d, 1, frames);
}

bool try_place(Rng& rng, VideoPlan& video, std::size_t cls, std::size_t dur, bool overlap) {
  const std::size_t frames = video.length;
  if (dur > frames) {
    return false;
  }
  std::vector<const Segment*> others;
  for (const auto& s : video.segments) {
    if (s.class_id != cls) {
      others.push_back(&s);
    }
  }
  overlap = overlap && !others.empty();
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::size_t lo = 0;
    std::size_t hi = frames - dur;
    if (overlap) {
      const Segment& host = *others[rng.below(others.size())];
      lo = host.start + 1 > dur ? host.start + 1 - dur : 0;
      hi = std::min(hi, host.end - 1);
      if (lo > hi) {
        continue;
      }
    }
    const std::size_t start = lo + rng.below(hi - lo + 1);
    const std::size_t end = start + dur;
    bool ok = true;
    for (const auto& s : video.segments) {
      // Same-class segments keep a gap so they stay distinct instances.
      if (s.class_id == cls ? collides(s, start, end, true)
                            : (!overlap && collides(s, start, end, false))) {
        ok = false;
        break;
      }
    }
    if (ok) {
      video.segments.push_back({cls, start, end});
      return true;
    }
  }
  return false;
}

}  // namespace

void CorpusConfig::validate() const {
  require(train_videos + test_videos >= 1, "need at least one video");
  require(frames >= 1, "frames must be >= 1");
  require(feature_dim >= 1, "feature_dim must be >= 1");
  require(num_classes >= 1, "num_classes must be >= 1");
  require(presence.size() == num_classes,
          "presence has " + std::to_string(presence.size()) + " entries for " +
              std::to_string(num_classes) + " classes");
  require(mean_duration.size() == num_classes,
          "mean_duration has " + std::to_string(mean_duration.size()) + " entries for " +
              std::to_string(num_classes) + " classes");
  for (std::size_t c = 0; c < num_classes; ++c) {
    require(presence[c] >= 0.0 && presence[c] < 1.0,
            "presence[" + std::to_string(c) + "] must be in [0, 1)");
    require(mean_duration[c] >= 1.0, "mean_duration[" + std::to_string(c) + "] must be >= 1");
  }
  require(separation >= 0.0 && std::isfinite(separation), "separation must be >= 0");
  require(noise >= 0.0 && std::isfinite(noise), "noise must be >= 0");
  require(in_unit(cooccurrence), "cooccurrence must be in [0, 1]");
  require(in_unit(repeat), "repeat must be in [0, 1]");
  require(in_unit(bg_only_fraction), "bg_only_fraction must be in [0, 1]");
  require(scene_count >= 1, "scene_count must be >= 1");
  require(scene_run >= 1.0, "scene_run must be >= 1");
  require(in_unit(shared_foreground), "shared_foreground must be in [0, 1]");
  require(in_unit(confuser_mix), "confuser_mix must be in [0, 1]");
}

void GenerationCounters::add(const VideoPlan& plan, std::size_t num_classes) {
  class_frames.resize(num_classes, 0);
  ++videos;
  if (plan.segments.empty()) {
    ++bg_only_videos;
  }
  total_frames += plan.length;
  std::vector<char> fg(plan.length, 0);
  for (const auto& s : plan.segments) {
    class_frames[s.class_id] += s.end - s.start;
    std::fill(fg.begin() + static_cast<std::ptrdiff_t>(s.start),
              fg.begin() + static_cast<std::ptrdiff_t>(s.end), 1);
  }
  foreground_frames += static_cast<std::size_t>(std::count(fg.begin(), fg.end(), 1));
}

Prototypes make_prototypes(const CorpusConfig& config) {
  Rng rng(derive_seed(config.seed, "prototypes"));
  const std::size_t dim = config.feature_dim;
  const double a = config.shared_foreground;
  const double b = std::sqrt(1.0 - a * a);
  const Tensor shared = random_direction(rng, dim);
  Prototypes p;
  for (std::size_t c = 0; c < config.num_classes; ++c) {
    Tensor own = random_direction(rng, dim);
    Tensor v(Shape{dim});
    for (std::size_t d = 0; d < dim; ++d) {
      v[d] = static_cast<float>(config.separation * (a * shared[d] + b * own[d]));
    }
    p.classes.push_back(std::move(v));
    p.specific.push_back(std::move(own));
  }
  for (std::size_t s = 0; s < config.scene_count; ++s) {
    p.scenes.push_back(scaled(random_direction(rng, dim), config.separation));
  }
  for (std::size_t s = 0; s < config.confuser_scenes; ++s) {
    const Tensor& target = p.specific[s % config.num_classes];
    const Tensor other = random_direction(rng, dim);
    const double m = config.confuser_mix;
    const double r = std::sqrt(1.0 - m * m);
    Tensor v(Shape{dim});
    for (std::size_t d = 0; d < dim; ++d) {
      v[d] = static_cast<float>(config.separation * (m * target[d] + r * other[d]));
    }
    p.scenes.push_back(std::move(v));
  }
  return p;
}

std::vector<VideoPlan> plan_split(const CorpusConfig& config, const std::string& split,
                                  std::size_t videos) {
  config.validate();
  Rng rng(derive_seed(config.seed, "plan/" + split));
  std::vector<VideoPlan> plans(videos);
  for (std::size_t i = 0; i < videos; ++i) {
    plans[i].id = video_id(split, i);
    plans[i].length = config.frames;
  }

  std::vector<std::size_t> order(videos);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  const auto reserved = static_cast<std::size_t>(
      std::llround(config.bg_only_fraction * static_cast<double>(videos)));
  std::vector<std::size_t> eligible;
  for (std::size_t k = 0; k < videos; ++k) {
    if (k < reserved) {
      plans[order[k]].reserved_bg = true;
    } else {
      eligible.push_back(order[k]);
    }
  }
  std::sort(eligible.begin(), eligible.end());

  for (std::size_t c = 0; c < config.num_classes; ++c) {
    const auto quota = static_cast<std::size_t>(std::llround(
        config.presence[c] * static_cast<double>(videos) * static_cast<double>(config.frames)));
    if (quota == 0) {
      continue;
    }
    require(!eligible.empty(), "class " + std::to_string(c) +
                                   " needs frames but every video is reserved background-only");
    std::vector<std::size_t> durations;
    std::size_t total = 0;
    while (total < quota) {
      const std::size_t d =
          std::min(draw_duration(rng, config.mean_duration[c], config.frames), quota - total);
      durations.push_back(d);
      total += d;
    }
    std::vector<std::size_t> holders;
    for (const std::size_t dur : durations) {
      bool placed = false;
      for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
        std::vector<std::size_t> hosts;
        for (const std::size_t e : eligible) {
          for (const auto& s : plans[e].segments) {
            if (s.class_id != c) {
              hosts.push_back(e);
              break;
            }
          }
        }
        const bool overlap = !hosts.empty() && rng.bernoulli(config.cooccurrence);
        const bool reuse = !overlap && !holders.empty() && rng.bernoulli(config.repeat);
        const std::size_t v = overlap ? hosts[rng.below(hosts.size())]
                              : reuse ? holders[rng.below(holders.size())]
                                      : eligible[rng.below(eligible.size())];
        placed = try_place(rng, plans[v], c, dur, overlap);
        if (placed && std::find(holders.begin(), holders.end(), v) == holders.end()) {
          holders.push_back(v);
        }
      }
      require(placed, "cannot fit class " + std::to_string(c) + " segments of " +
                          std::to_string(dur) + " frames at presence " +
                          std::to_string(config.presence[c]));
    }
  }
  for (auto& p : plans) {
    std::sort(p.segments.begin(), p.segments.end(), [](const Segment& a, const Segment& b) {
      return a.start != b.start ? a.start < b.start : a.class_id < b.class_id;
    });
  }
  return plans;
}

std::vector<labeling::FirstOccurrence> first_occurrences_of(const std::vector<Segment>& segments,
                                                            std::size_t num_classes) {
  std::vector<labeling::FirstOccurrence> out;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const Segment* first = nullptr;
    for (const auto& s : segments) {
      if (s.class_id == c && (first == nullptr || s.start < first->start)) {
        first = &s;
      }
    }
    if (first != nullptr) {
      out.push_back({c, first->start, first->end});
    }
  }
  return out;
}

SyntheticVideo render_video(const CorpusConfig& config, const Prototypes& prototypes,
                            const VideoPlan& plan) {
  Rng rng(derive_seed(config.seed, "video/" + plan.id));
  const std::size_t frames = plan.length;
  const std::size_t dim = config.feature_dim;
  const std::size_t classes = config.num_classes;

  // Confusing scenes are kept out of any video that has a real segment.
  const std::size_t pool = plan.segments.empty() ? prototypes.scenes.size() : config.scene_count;
  std::vector<std::size_t> scene(frames);
  for (std::size_t t = 0; t < frames;) {
    const std::size_t s = rng.below(pool);
    const auto run = 1 + static_cast<std::size_t>(
                             (config.scene_run - 1.0) * -std::log(1.0 - rng.uniform()));
    for (std::size_t k = 0; k < run && t < frames; ++k, ++t) {
      scene[t] = s;
    }
  }

  std::vector<char> active(frames * classes, 0);
  for (const auto& s : plan.segments) {
    for (std::size_t t = s.start; t < s.end; ++t) {
      active[t * classes + s.class_id] = 1;
    }
  }

  SyntheticVideo video;
  video.plan = plan;
  video.features = Tensor(Shape{frames, dim});
  std::vector<double> mean(dim);
  for (std::size_t t = 0; t < frames; ++t) {
    std::size_t n_active = 0;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
      if (active[t * classes + c]) {
        ++n_active;
        for (std::size_t d = 0; d < dim; ++d) {
          mean[d] += prototypes.classes[c][d];
        }
      }
    }
    if (n_active == 0) {
      for (std::size_t d = 0; d < dim; ++d) {
        mean[d] = prototypes.scenes[scene[t]][d];
      }
    } else {
      for (auto& m : mean) {
        m /= static_cast<double>(n_active);
      }
    }
    for (std::size_t d = 0; d < dim; ++d) {
      video.features.at(t, d) = static_cast<float>(mean[d] + config.noise * rng.normal());
    }
  }

  video.labels.assign(classes, 0);
  for (const auto& s : plan.segments) {
    video.labels[s.class_id] = 1;
  }
  video.first_occurrences = first_occurrences_of(plan.segments, classes);
  return video;
}

std::vector<std::string> default_class_names(std::size_t num_classes) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < num_classes; ++c) {
    names.push_back("class" + std::to_string(c));
  }
  return names;
}

CorpusSummary write_corpus(const CorpusConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  const Prototypes prototypes = make_prototypes(config);

  CorpusSummary summary;
  summary.counters.class_frames.assign(config.num_classes, 0);
  Manifest* targets[] = {&summary.train, &summary.test};
  const std::string splits[] = {"train", "test"};
  const std::size_t counts[] = {config.train_videos, config.test_videos};

  summary.truth.split = "all";
  for (int k = 0; k < 2; ++k) {
    Manifest& m = *targets[k];
    m.split = splits[k];
    m.base_dir = out_dir;
    const std::vector<VideoPlan> plans = plan_split(config, splits[k], counts[k]);
    std::vector<VideoEntry> entries(plans.size());
    parallel_for(plans.size(), [&](std::size_t i) {
      const SyntheticVideo v = render_video(config, prototypes, plans[i]);
      VideoEntry& e = entries[i];
      e.id = v.plan.id;
      e.path = "features/" + v.plan.id + ".c2fv";
      e.length = v.plan.length;
      e.labels = v.labels;
      e.first_occurrences = v.first_occurrences;
      e.segments = v.plan.segments;
      write_features(out_dir / e.path, v.features);
    });
    for (std::size_t i = 0; i < plans.size(); ++i) {
      summary.counters.add(plans[i], config.num_classes);
      summary.truth.videos.push_back(entries[i]);
      if (splits[k] == "train") {
        entries[i].segments.reset();
      }
      m.videos.push_back(std::move(entries[i]));
    }
  }
  for (Manifest* m : {&summary.train, &summary.test, &summary.truth}) {
    m->feature_dim = config.feature_dim;
    m->num_classes = config.num_classes;
    m->class_names = default_class_names(config.num_classes);
    m->base_dir = out_dir;
  }
  save_manifest(summary.train, out_dir / "train.json");
  save_manifest(summary.test, out_dir / "test.json");
  save_manifest(summary.truth, out_dir / "truth.json");
  return summary;
}

}  // namespace c2f::synthdata
