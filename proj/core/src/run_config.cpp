#include "c2f/run_config.hpp"

#include <functional>

#include <json.hpp>

#include "c2f/binary_io.hpp"
#include "c2f/errors.hpp"

namespace c2f {

using json = nlohmann::ordered_json;

void RunConfig::sync() {
  train.model.feature_dim = corpus.feature_dim;
  train.model.num_classes = corpus.num_classes;
  train.model.heads = trainer::heads_for(train.mode);
}

void RunConfig::validate() const {
  corpus.validate();
  train.validate();
  inference.validate();
}

void RunConfig::set_seed(std::uint64_t seed) {
  corpus.seed = seed;
  train.seed = seed;
}

RunConfig default_run_config() {
  RunConfig c;
  c.train.model.hidden = {256, 128};
  c.sync();
  return c;
}

namespace {

struct Key {
  const char* section;
  const char* name;
  const char* help;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

[[noreturn]] void bad_type(const std::string& what) {
  throw ConfigError("expected " + what);
}

std::size_t to_size(const json& j) {
  if (!j.is_number_unsigned()) bad_type("a non-negative integer");
  return j.get<std::size_t>();
}

double to_double(const json& j) {
  if (!j.is_number()) bad_type("a number");
  return j.get<double>();
}

std::vector<double> to_doubles(const json& j) {
  if (!j.is_array()) bad_type("an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(to_double(x));
  return out;
}

std::vector<std::size_t> to_sizes(const json& j) {
  if (!j.is_array()) bad_type("an array of non-negative integers");
  std::vector<std::size_t> out;
  for (const auto& x : j) out.push_back(to_size(x));
  return out;
}

std::string to_str(const json& j) {
  if (!j.is_string()) bad_type("a string");
  return j.get<std::string>();
}

bool to_bool(const json& j) {
  if (!j.is_boolean()) bad_type("true or false");
  return j.get<bool>();
}

#define C2F_SIZE(sec, field, member, text)                              \
  Key{sec, field, text, [](const RunConfig& c) { return json(c.member); }, \
      [](RunConfig& c, const json& j) { c.member = to_size(j); }}
#define C2F_REAL(sec, field, member, type, text)                        \
  Key{sec, field, text, [](const RunConfig& c) { return json(c.member); }, \
      [](RunConfig& c, const json& j) { c.member = static_cast<type>(to_double(j)); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      C2F_SIZE("corpus", "train_videos", corpus.train_videos, "videos in the train split"),
      C2F_SIZE("corpus", "test_videos", corpus.test_videos, "videos in the test split"),
      C2F_SIZE("corpus", "frames", corpus.frames, "frames per video"),
      C2F_SIZE("corpus", "feature_dim", corpus.feature_dim, "feature dimension D"),
      C2F_SIZE("corpus", "num_classes", corpus.num_classes, "action classes C"),
      Key{"corpus", "presence", "per-class fraction of all frames",
          [](const RunConfig& c) { return json(c.corpus.presence); },
          [](RunConfig& c, const json& j) { c.corpus.presence = to_doubles(j); }},
      Key{"corpus", "mean_duration", "per-class mean segment length in frames",
          [](const RunConfig& c) { return json(c.corpus.mean_duration); },
          [](RunConfig& c, const json& j) { c.corpus.mean_duration = to_doubles(j); }},
      C2F_REAL("corpus", "separation", corpus.separation, double, "prototype norm"),
      C2F_REAL("corpus", "noise", corpus.noise, double, "per-dimension noise std"),
      C2F_REAL("corpus", "cooccurrence", corpus.cooccurrence, double,
               "chance a segment overlaps another class"),
      C2F_REAL("corpus", "repeat", corpus.repeat, double,
               "chance a class recurs in a video that already has it"),
      C2F_REAL("corpus", "bg_only_fraction", corpus.bg_only_fraction, double,
               "videos reserved to have no segment"),
      C2F_SIZE("corpus", "scene_count", corpus.scene_count, "background scene prototypes"),
      C2F_REAL("corpus", "scene_run", corpus.scene_run, double, "mean scene length in frames"),
      C2F_REAL("corpus", "shared_foreground", corpus.shared_foreground, double,
               "weight of a direction common to all class prototypes"),
      C2F_SIZE("corpus", "confuser_scenes", corpus.confuser_scenes,
               "scenes resembling a class, only in segment-free videos"),
      C2F_REAL("corpus", "confuser_mix", corpus.confuser_mix, double,
               "weight of the class prototype in a confusing scene"),
      C2F_SIZE("corpus", "seed", corpus.seed, "generator seed"),

      C2F_SIZE("model", "max_frames", train.model.max_frames, "training window T"),
      C2F_SIZE("model", "conv_channels", train.model.conv_channels, "temporal conv channels"),
      C2F_SIZE("model", "kernel_width", train.model.kernel_width, "temporal conv width (odd)"),
      Key{"model", "hidden", "fully connected layer widths",
          [](const RunConfig& c) { return json(c.train.model.hidden); },
          [](RunConfig& c, const json& j) { c.train.model.hidden = to_sizes(j); }},
      C2F_REAL("model", "fg_threshold", train.model.fg_threshold, float,
               "foreground scores below this are zeroed for the frame loss"),
      C2F_REAL("model", "topk_ratio", train.model.topk_ratio, float,
               "fraction of frames averaged into the video score"),

      C2F_REAL("loss", "alpha", train.loss.alpha, float, "foreground loss weight"),
      C2F_REAL("loss", "beta", train.loss.beta, float, "conditional loss weight"),
      C2F_REAL("loss", "gamma", train.loss.gamma, float, "background-only mass weight"),
      C2F_REAL("loss", "delta", train.loss.delta, float, "total variation weight"),

      C2F_SIZE("train", "batch_size", train.batch_size, "videos per step"),
      C2F_REAL("train", "learning_rate", train.learning_rate, float, "Adam step size"),
      C2F_SIZE("train", "epochs", train.epochs, "passes over the train split"),
      C2F_SIZE("train", "seed", train.seed, "initialization, sampling and shuffling seed"),
      C2F_REAL("train", "bg_fraction", train.bg_fraction, double,
               "share of pre-occurrence frames sampled as negatives"),
      Key{"train", "mode", "FO, FO+VL or FO+VL+PD",
          [](const RunConfig& c) { return json(trainer::mode_name(c.train.mode)); },
          [](RunConfig& c, const json& j) { c.train.mode = trainer::parse_mode(to_str(j)); }},

      C2F_REAL("inference", "video_threshold", inference.video_threshold, float,
               "minimum video score for a class to emit segments"),
      C2F_REAL("inference", "frame_threshold", inference.frame_threshold, float,
               "minimum action score of a segment frame"),
      C2F_SIZE("inference", "min_length", inference.min_length, "shortest kept segment"),
      C2F_SIZE("inference", "merge_gap", inference.merge_gap, "longest gap bridged"),

      Key{"eval", "protocol", "first-occurrence or all-occurrence",
          [](const RunConfig& c) { return json(eval::protocol_name(c.eval.protocol)); },
          [](RunConfig& c, const json& j) { c.eval.protocol = eval::parse_protocol(to_str(j)); }},
      Key{"eval", "score_curves", "write per-video score CSVs",
          [](const RunConfig& c) { return json(c.eval.score_curves); },
          [](RunConfig& c, const json& j) { c.eval.score_curves = to_bool(j); }},
  };
  return table;
}

#undef C2F_SIZE
#undef C2F_REAL

const Key* find_key(const std::string& section, const std::string& name) {
  for (const auto& k : keys()) {
    if (section == k.section && name == k.name) return &k;
  }
  return nullptr;
}

bool known_section(const std::string& s) {
  for (const auto& k : keys()) {
    if (s == k.section) return true;
  }
  return false;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  RunConfig c = default_run_config();
  for (const auto& [section, body] : doc.items()) {
    if (!known_section(section)) {
      throw ConfigError("unknown config section '" + section + "'");
    }
    if (!body.is_object()) {
      throw ConfigError("config section '" + section + "' must be an object");
    }
    for (const auto& [name, value] : body.items()) {
      const Key* k = find_key(section, name);
      if (k == nullptr) {
        throw ConfigError("unknown config key '" + section + "." + name + "'");
      }
      try {
        k->set(c, value);
      } catch (const ConfigError& e) {
        throw ConfigError(section + "." + name + ": " + e.what());
      }
    }
  }
  c.sync();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(binary::read_file(path));
}

std::string run_config_to_json(const RunConfig& config) {
  json doc = json::object();
  for (const auto& k : keys()) {
    doc[k.section][k.name] = k.get(config);
  }
  return doc.dump(2) + "\n";
}

std::string run_config_help() {
  const RunConfig d = default_run_config();
  std::string out = "Config keys (JSON sections), with defaults:\n";
  for (const auto& k : keys()) {
    std::string name = std::string(k.section) + "." + k.name;
    name.resize(std::max<std::size_t>(name.size(), 26), ' ');
    std::string value = k.get(d).dump();
    value.resize(std::max<std::size_t>(value.size(), 28), ' ');
    out += "  " + name + " " + value + " " + k.help + "\n";
  }
  return out;
}

}  // namespace c2f
