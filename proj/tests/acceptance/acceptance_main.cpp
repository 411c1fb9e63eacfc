// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "c2f/binary_io.hpp"
#include "c2f/eval.hpp"
#include "c2f/synthdata/corpus_stats.hpp"
#include "c2f/synthdata/generator.hpp"
#include "support/grad_suite.hpp"
#include "support/oracle_suite.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace c2f;

namespace {

struct Context {
  std::string cli;
  fs::path work;
  fs::path configs;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  // Criterion 4's wall clock, which criterion 5 adds to.
  double ablation_seconds = 0.0;
};

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

int run_cli(const Context& c, const std::string& args, const fs::path& log) {
  const std::string cmd = "'" + c.cli + "' " + args + " > '" + log.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void require_cli(const Context& c, const std::string& args, const fs::path& log) {
  if (const int rc = run_cli(c, args, log); rc != 0) {
    throw std::runtime_error("c2f " + args.substr(0, args.find(' ')) + " exited " +
                             std::to_string(rc) + " (log " + log.string() + ")");
  }
}

json read_json(const fs::path& p) { return json::parse(binary::read_file(p)); }

// ---- 1
Verdict gradients(Context&) {
  Stopwatch sw;
  const auto entries = check::run_gradient_suite();
  const double secs = sw.seconds();
  std::size_t checked = 0;
  std::vector<std::string> bad;
  for (const auto& e : entries) {
    checked += e.stats.checked;
    if (!e.stats.ok()) bad.push_back(e.name + " (" + e.stats.worst + ")");
  }
  std::string d = std::to_string(entries.size()) + " checks, " + std::to_string(checked) +
                  " partials, " + fmt(secs) + " s";
  for (const auto& b : bad) d += "; failed " + b;
  return {bad.empty() && secs < 30.0, d};
}

// ---- 2
Verdict oracles(Context&) {
  const auto topk = check::topk_vs_oracle(2024, 1000);
  const auto ap = check::ap_vs_oracle(2025, 500, 1e-9);
  const auto conv = check::conv_vs_oracle(2026, 100);
  std::string d = "topk " + std::to_string(topk.cases - topk.mismatches) + "/" +
                  std::to_string(topk.cases) + ", AP " +
                  std::to_string(ap.cases - ap.mismatches) + "/" + std::to_string(ap.cases) +
                  ", conv " + std::to_string(conv.cases - conv.mismatches) + "/" +
                  std::to_string(conv.cases);
  for (const auto* r : {&topk, &ap, &conv}) {
    if (r->mismatches) d += "; " + r->first;
  }
  const bool counts = topk.cases == 1000 && ap.cases == 500 && conv.cases == 100;
  return {counts && topk.mismatches + ap.mismatches + conv.mismatches == 0, d};
}

// ---- 3
Verdict imbalance(Context& c) {
  Stopwatch sw;
  synthdata::CorpusConfig cfg;
  cfg.seed = 1;
  const auto summary = synthdata::write_corpus(cfg, c.work / "imbalance");
  const auto stats = synthdata::corpus_stats(summary.truth);
  const double secs = sw.seconds();
  const std::vector<double> target = {0.8, 0.2, 1.3, 0.7};
  bool ok = stats.classes.size() == target.size() && secs < 60.0;
  std::string d = "presence";
  for (std::size_t k = 0; k < stats.classes.size() && k < target.size(); ++k) {
    const auto& cl = stats.classes[k];
    d += " " + fmt(cl.all_percent, 3) + "%";
    ok = ok && std::abs(cl.all_percent - target[k]) <= 0.2 && cl.improvement >= 10.0;
  }
  ok = ok && std::abs(stats.fg_percent - 2.5) <= 0.5;
  double worst = 1e300;
  for (const auto& cl : stats.classes) worst = std::min(worst, cl.improvement);
  d += ", foreground " + fmt(stats.fg_percent, 3) + "%, min ratio " + fmt(worst, 1) + "x, " +
       fmt(secs) + " s";
  return {ok, d};
}

// ---- 4
Verdict ordering(Context& c) {
  Stopwatch sw;
  const fs::path cfg = c.configs / "ablation.json";
  std::size_t good = 0;
  std::string d;
  for (const auto seed : c.seeds) {
    const fs::path dir = c.work / ("ablation_s" + std::to_string(seed));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string s = " --seed " + std::to_string(seed);
    require_cli(c, "gen-data --config '" + cfg.string() + "'" + s + " --out '" +
                       (dir / "data").string() + "'",
                dir / "gen.log");
    require_cli(c, "ablate --config '" + cfg.string() + "'" + s + " --manifest '" +
                       (dir / "data/train.json").string() + "' --test-manifest '" +
                       (dir / "data/test.json").string() + "' --out '" +
                       (dir / "ablation").string() + "'",
                dir / "ablate.log");
    const json a = read_json(dir / "ablation/ablation.json");
    std::vector<double> m;
    for (const auto& arm : a.at("arms")) {
      const auto& v = arm.at("first_occurrence").at("average_map");
      m.push_back(v.is_null() ? 0.0 : v.get<double>());
    }
    const bool ok = m.size() == 3 && m[1] - m[0] >= 2.0 && m[2] - m[1] >= 2.0;
    good += ok;
    d += (d.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " FO " +
         fmt(m.at(0), 1) + " / FO+VL " + fmt(m.at(1), 1) + " / FO+VL+PD " + fmt(m.at(2), 1) +
         (ok ? " ok" : " out of order");
  }
  c.ablation_seconds = sw.seconds();
  d += "; " + fmt(c.ablation_seconds, 0) + " s";
  return {good >= 2 && c.ablation_seconds < 45 * 60.0, d};
}

// ---- 5
Verdict recovery(Context& c) {
  Stopwatch sw;
  const fs::path cfg = c.configs / "recovery.json";
  const json doc = read_json(cfg);
  const json corpus = doc.value("corpus", json::object());
  const double sep = corpus.value("separation", synthdata::CorpusConfig{}.separation);
  const double noise = corpus.value("noise", synthdata::CorpusConfig{}.noise);
  const fs::path dir = c.work / "recovery";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string base = "--config '" + cfg.string() + "' --seed " +
                           std::to_string(c.seeds.front());
  require_cli(c, "gen-data " + base + " --out '" + (dir / "data").string() + "'",
              dir / "gen.log");
  require_cli(c, "train " + base + " --mode FO+VL+PD --manifest '" +
                     (dir / "data/train.json").string() + "' --out '" +
                     (dir / "train").string() + "'",
              dir / "train.log");
  require_cli(c, "infer " + base + " --checkpoint '" + (dir / "train/model.c2fck").string() +
                     "' --manifest '" + (dir / "data/test.json").string() + "' --out '" +
                     (dir / "infer").string() + "'",
              dir / "infer.log");
  require_cli(c, "eval " + base + " --protocol all-occurrence --predictions '" +
                     (dir / "infer/predictions.json").string() + "' --manifest '" +
                     (dir / "data/test.json").string() + "' --out '" +
                     (dir / "eval").string() + "'",
              dir / "eval.log");
  const json r = read_json(dir / "eval/report_all-occurrence.json");
  const auto& cell = r.at("map").at(2);
  const double m = cell.is_null() ? 0.0 : cell.get<double>();
  const double total = c.ablation_seconds + sw.seconds();
  const bool ok = sep >= 4.0 * noise && m >= 80.0 && total < 45 * 60.0;
  return {ok, "separation " + fmt(sep, 1) + " vs noise " + fmt(noise, 1) + ", mAP@0.2 " +
                  fmt(m, 1) + ", with criterion 4 " + fmt(total, 0) + " s"};
}

// ---- 6
std::vector<inference::SegmentPrediction> truth_as_predictions(const synthdata::Manifest& m) {
  std::vector<inference::SegmentPrediction> out;
  for (const auto& v : m.videos) {
    for (const auto& s : *v.segments) out.push_back({v.id, s.class_id, s.start, s.end, 1.0f});
  }
  return out;
}

bool all_cells_full(const eval::EvalReport& r, std::string& why) {
  auto full = [](const std::optional<double>& x) { return x && std::abs(*x - 1.0) < 1e-12; };
  const std::string where = eval::protocol_name(r.protocol);
  for (std::size_t k = 0; k < r.ap.size(); ++k) {
    for (std::size_t t = 0; t < r.ap[k].size(); ++t) {
      if (!full(r.ap[k][t])) {
        why = where + " class " + std::to_string(k) + " IoU " + fmt(r.thresholds[t], 1);
        return false;
      }
    }
    if (!full(r.class_average[k])) {
      why = where + " class " + std::to_string(k) + " average";
      return false;
    }
  }
  if (!std::all_of(r.map.begin(), r.map.end(), full) || !full(r.average_map)) {
    why = where + " mAP";
    return false;
  }
  return true;
}

Verdict protocols(Context& c) {
  // Truth of both splits of the criterion 3 corpus, or a fresh one.
  const fs::path truth = c.work / "imbalance/truth.json";
  if (!fs::exists(truth)) {
    synthdata::CorpusConfig cfg;
    cfg.seed = 1;
    synthdata::write_corpus(cfg, c.work / "imbalance");
  }
  const synthdata::Manifest m = synthdata::load_manifest(truth);
  const auto preds = truth_as_predictions(m);
  std::string why;
  bool ok = true;
  for (const auto p : {eval::Protocol::kAllOccurrence, eval::Protocol::kFirstOccurrence}) {
    ok = ok && all_cells_full(eval::evaluate(preds, m, p), why);
  }
  std::string d = std::to_string(preds.size()) + " truth segments as predictions: " +
                  (ok ? "100.0 everywhere" : "short of 100 at " + why);

  // One video, class 0 first at [10, 20) and again at [50, 60). A confident
  // prediction on the second instance must vanish under first-occurrence.
  synthdata::Manifest f;
  f.split = "fixture";
  f.feature_dim = 1;
  f.num_classes = 1;
  f.class_names = {"class0"};
  synthdata::VideoEntry v;
  v.id = "fixture";
  v.path = "fixture.c2fv";
  v.length = 80;
  v.labels = {1};
  v.first_occurrences = {{0, 10, 20}};
  v.segments = std::vector<synthdata::Segment>{{0, 10, 20}, {0, 50, 60}};
  f.videos = {v};
  const std::vector<inference::SegmentPrediction> planted = {{"fixture", 0, 10, 20, 0.5f},
                                                             {"fixture", 0, 50, 60, 0.9f}};
  const auto fo = eval::evaluate(planted, f, eval::Protocol::kFirstOccurrence);
  // Kept, it would rank first as a false positive: AP 0.5.
  auto kept = f;
  kept.videos[0].segments = std::vector<synthdata::Segment>{{0, 10, 20}};
  const auto all = eval::evaluate(planted, kept, eval::Protocol::kAllOccurrence);
  const bool dropped = fo.predictions_used == 1 && fo.ap[0][0] && *fo.ap[0][0] == 1.0 &&
                       all.ap[0][0] && std::abs(*all.ap[0][0] - 0.5) < 1e-12;
  d += std::string(", planted prediction ") + (dropped ? "discarded" : "survived") + " (used " +
       std::to_string(fo.predictions_used) + " of 2)";
  return {ok && dropped, d};
}

// ---- 7
std::vector<std::string> files_under(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Verdict determinism(Context& c) {
  const fs::path cfg = c.configs / "determinism.json";
  const std::string base = "--config '" + cfg.string() + "' --seed 7";
  std::vector<fs::path> roots;
  for (const char* name : {"a", "b"}) {
    const fs::path dir = c.work / "determinism" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path logs = c.work / "determinism" / (std::string(name) + "_logs");
    fs::create_directories(logs);
    require_cli(c, "gen-data " + base + " --out '" + (dir / "data").string() + "'",
                logs / "gen.log");
    require_cli(c, "train " + base + " --manifest '" + (dir / "data/train.json").string() +
                       "' --out '" + (dir / "train").string() + "'",
                logs / "train.log");
    require_cli(c, "infer " + base + " --checkpoint '" + (dir / "train/model.c2fck").string() +
                       "' --manifest '" + (dir / "data/test.json").string() + "' --out '" +
                       (dir / "infer").string() + "'",
                logs / "infer.log");
    for (const char* p : {"first-occurrence", "all-occurrence"}) {
      require_cli(c, "eval " + base + " --protocol " + p + " --predictions '" +
                         (dir / "infer/predictions.json").string() + "' --manifest '" +
                         (dir / "data/test.json").string() + "' --out '" +
                         (dir / "eval").string() + "'",
                  logs / (std::string("eval_") + p + ".log"));
    }
    roots.push_back(dir);
  }
  const auto fa = files_under(roots[0]), fb = files_under(roots[1]);
  if (fa != fb) return {false, "file lists differ"};
  std::size_t ckpt = 0, differ = 0;
  std::string first;
  for (const auto& f : fa) {
    ckpt += f.ends_with(".c2fck");
    if (binary::read_file(roots[0] / f) != binary::read_file(roots[1] / f)) {
      if (differ++ == 0) first = f;
    }
  }
  const bool kinds = std::count(fa.begin(), fa.end(), "data/train.json") &&
                     std::count(fa.begin(), fa.end(), "infer/predictions.json") &&
                     std::count(fa.begin(), fa.end(), "eval/report_all-occurrence.json") &&
                     ckpt > 0;
  return {differ == 0 && kinds, std::to_string(fa.size()) + " files (" + std::to_string(ckpt) +
                                    " checkpoints), " + std::to_string(differ) + " differ" +
                                    (differ ? ", first " + first : "")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-7"};
  Context c;
  std::string work = "acceptance_work";
  std::string configs = C2F_CONFIG_DIR;
  std::vector<int> only;
  app.add_option("--cli", c.cli, "path to the c2f executable")->required();
  app.add_option("--work", work, "scratch directory");
  app.add_option("--configs", configs, "directory with ablation/recovery/determinism.json");
  app.add_option("--only", only, "criteria to run, e.g. --only 1 2");
  app.add_option("--seeds", c.seeds, "seeds for criterion 4");
  CLI11_PARSE(app, argc, argv);
  c.work = fs::absolute(work);
  c.configs = fs::absolute(configs);
  fs::create_directories(c.work);

  const std::vector<std::pair<int, std::function<Verdict(Context&)>>> criteria = {
      {1, gradients}, {2, oracles},   {3, imbalance},  {4, ordering},
      {5, recovery},  {6, protocols}, {7, determinism}};
  const std::set<int> chosen(only.begin(), only.end());
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!chosen.empty() && !chosen.count(id)) continue;
    Verdict v;
    try {
      v = fn(c);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
