#include "c2f/synthdata/manifest.hpp"

#include <json.hpp>

#include "c2f/binary_io.hpp"
#include "c2f/errors.hpp"

namespace c2f::synthdata {

using json = nlohmann::ordered_json;

std::filesystem::path Manifest::feature_path(const VideoEntry& video) const {
  const std::filesystem::path p(video.path);
  return p.is_absolute() ? p : base_dir / p;
}

const VideoEntry* Manifest::find(const std::string& id) const {
  for (const auto& v : videos) {
    if (v.id == id) {
      return &v;
    }
  }
  return nullptr;
}

bool Manifest::has_segments() const {
  for (const auto& v : videos) {
    if (!v.segments) {
      return false;
    }
  }
  return true;
}

namespace {

json interval_json(std::size_t cls, std::size_t start, std::size_t end) {
  return json{{"class", cls}, {"start", start}, {"end", end}};
}

std::size_t get_size(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
    throw ConfigError(where + ": missing or non-integer '" + key + "'");
  }
  return j.at(key).get<std::size_t>();
}

}  // namespace

std::string manifest_to_json(const Manifest& m) {
  json doc;
  doc["format"] = "c2f-manifest";
  doc["version"] = 1;
  doc["split"] = m.split;
  doc["feature_dim"] = m.feature_dim;
  doc["num_classes"] = m.num_classes;
  doc["class_names"] = m.class_names;
  json videos = json::array();
  for (const auto& v : m.videos) {
    json jv;
    jv["id"] = v.id;
    jv["path"] = v.path;
    jv["length"] = v.length;
    jv["labels"] = v.labels;
    json fo = json::array();
    for (const auto& a : v.first_occurrences) {
      fo.push_back(interval_json(a.class_id, a.start, a.end));
    }
    jv["first_occurrences"] = std::move(fo);
    if (v.segments) {
      json segs = json::array();
      for (const auto& s : *v.segments) {
        segs.push_back(interval_json(s.class_id, s.start, s.end));
      }
      jv["segments"] = std::move(segs);
    }
    videos.push_back(std::move(jv));
  }
  doc["videos"] = std::move(videos);
  return doc.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest: not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "c2f-manifest") {
    throw ConfigError("manifest: missing \"format\": \"c2f-manifest\"");
  }
  Manifest m;
  m.base_dir = base_dir;
  m.split = doc.value("split", "");
  m.feature_dim = get_size(doc, "feature_dim", "manifest");
  m.num_classes = get_size(doc, "num_classes", "manifest");
  if (doc.contains("class_names")) {
    m.class_names = doc.at("class_names").get<std::vector<std::string>>();
  }
  if (!doc.contains("videos") || !doc.at("videos").is_array()) {
    throw ConfigError("manifest: missing \"videos\" array");
  }
  for (const auto& jv : doc.at("videos")) {
    VideoEntry v;
    v.id = jv.at("id").get<std::string>();
    const std::string where = "manifest video '" + v.id + "'";
    v.path = jv.at("path").get<std::string>();
    v.length = get_size(jv, "length", where);
    v.labels = jv.at("labels").get<std::vector<int>>();
    if (v.labels.size() != m.num_classes) {
      throw ConfigError(where + ": " + std::to_string(v.labels.size()) + " labels for " +
                        std::to_string(m.num_classes) + " classes");
    }
    for (const auto& ja : jv.at("first_occurrences")) {
      v.first_occurrences.push_back(
          {get_size(ja, "class", where), get_size(ja, "start", where), get_size(ja, "end", where)});
    }
    try {
      labeling::validate_annotations(v.first_occurrences, v.length, m.num_classes);
    } catch (const AnnotationError& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (jv.contains("segments")) {
      std::vector<Segment> segs;
      for (const auto& js : jv.at("segments")) {
        Segment s{get_size(js, "class", where), get_size(js, "start", where),
                  get_size(js, "end", where)};
        if (s.class_id >= m.num_classes || s.start >= s.end || s.end > v.length) {
          throw ConfigError(where + ": invalid segment");
        }
        segs.push_back(s);
      }
      v.segments = std::move(segs);
    }
    m.videos.push_back(std::move(v));
  }
  return m;
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  binary::write_file(path, manifest_to_json(manifest));
}

Manifest load_manifest(const std::filesystem::path& path) {
  const std::string text = binary::read_file(path);
  try {
    return manifest_from_json(text, path.parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": malformed manifest: " + e.what());
  }
}

}  // namespace c2f::synthdata
