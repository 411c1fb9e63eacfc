// c2f: generate a synthetic corpus, train, infer, evaluate, ablate.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "c2f/binary_io.hpp"
#include "c2f/errors.hpp"
#include "c2f/eval.hpp"
#include "c2f/inference.hpp"
#include "c2f/model/checkpoint.hpp"
#include "c2f/run_config.hpp"
#include "c2f/synthdata/corpus_stats.hpp"
#include "c2f/synthdata/generator.hpp"
#include "c2f/trainer.hpp"

namespace fs = std::filesystem;
using namespace c2f;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string checkpoint;
  std::string manifest;
  std::string test_manifest;
  std::string predictions;
  std::string protocol;
  std::string mode;
};

RunConfig resolve(const Options& o) {
  RunConfig c = o.config.empty() ? default_run_config() : load_run_config(o.config);
  if (o.seed) {
    c.set_seed(*o.seed);
  }
  if (!o.mode.empty()) {
    c.train.mode = trainer::parse_mode(o.mode);
  }
  if (!o.protocol.empty()) {
    c.eval.protocol = eval::parse_protocol(o.protocol);
  }
  c.sync();
  c.validate();
  return c;
}

// Training dims follow the manifest being trained on.
void adopt_dims(RunConfig& c, const synthdata::Manifest& m) {
  c.corpus.feature_dim = m.feature_dim;
  c.corpus.num_classes = m.num_classes;
  if (c.corpus.presence.size() != m.num_classes) {
    c.corpus.presence.assign(m.num_classes, 0.0);
    c.corpus.mean_duration.assign(m.num_classes, 1.0);
  }
  c.sync();
  c.validate();
}

void echo_config(const RunConfig& c, const fs::path& out) {
  binary::write_file(out / "resolved_config.json", run_config_to_json(c));
}

void progress(const std::string& line) { std::cerr << line << '\n'; }

int cmd_gen_data(const Options& o) {
  const RunConfig c = resolve(o);
  const fs::path out = o.out;
  const synthdata::CorpusSummary s = synthdata::write_corpus(c.corpus, out);
  const synthdata::CorpusStats stats = synthdata::corpus_stats(s.truth);
  binary::write_file(out / "stats.json", synthdata::stats_to_json(stats));
  const std::string table = synthdata::stats_table(stats);
  binary::write_file(out / "stats.txt", table);
  echo_config(c, out);
  std::cout << table;
  return 0;
}

int cmd_stats(const Options& o) {
  const synthdata::Manifest m = synthdata::load_manifest(o.manifest);
  const synthdata::CorpusStats stats = synthdata::corpus_stats(m);
  const std::string table = synthdata::stats_table(stats);
  if (!o.out.empty()) {
    binary::write_file(fs::path(o.out) / "stats.json", synthdata::stats_to_json(stats));
    binary::write_file(fs::path(o.out) / "stats.txt", table);
  }
  std::cout << table;
  return 0;
}

int cmd_train(const Options& o) {
  RunConfig c = resolve(o);
  const synthdata::Manifest m = synthdata::load_manifest(o.manifest);
  adopt_dims(c, m);
  const fs::path out = o.out;
  echo_config(c, out);
  const trainer::TrainingRun run = trainer::train(c.train, m, out, progress);
  std::cout << "trained " << trainer::mode_name(c.train.mode) << " for " << run.steps
            << " steps; final batch loss " << (run.history.empty() ? 0.0f : run.history.back().total)
            << "\ncheckpoint: " << (out / "model.c2fck").string() << '\n';
  return 0;
}

int cmd_infer(const Options& o) {
  const RunConfig c = resolve(o);
  const model::ModelParams params = model::load_checkpoint(o.checkpoint);
  const synthdata::Manifest m = synthdata::load_manifest(o.manifest);
  const auto preds = inference::run_inference(params, m, c.inference);
  const fs::path out = o.out;
  inference::save_predictions(preds, out / "predictions.json");
  echo_config(c, out);
  std::cout << preds.size() << " segments for " << m.videos.size() << " videos -> "
            << (out / "predictions.json").string() << '\n';
  return 0;
}

int cmd_eval(const Options& o) {
  const RunConfig c = resolve(o);
  const synthdata::Manifest m = synthdata::load_manifest(o.manifest);
  const auto preds = inference::load_predictions(o.predictions);
  const eval::EvalReport report = eval::evaluate(preds, m, c.eval.protocol);
  const fs::path out = o.out;
  const std::string stem = "report_" + eval::protocol_name(c.eval.protocol);
  const std::string table = eval::report_table(report);
  binary::write_file(out / (stem + ".json"), eval::report_to_json(report));
  binary::write_file(out / (stem + ".txt"), table);
  if (c.eval.score_curves) {
    if (o.checkpoint.empty()) {
      throw ConfigError("eval.score_curves needs --checkpoint");
    }
    const model::ModelParams params = model::load_checkpoint(o.checkpoint);
    for (const auto& v : m.videos) {
      binary::write_file(out / "curves" / (v.id + ".csv"),
                         inference::score_curves_csv(inference::score_video(params, m, v)));
    }
  }
  echo_config(c, out);
  std::cout << table;
  return 0;
}

int cmd_ablate(const Options& o) {
  RunConfig c = resolve(o);
  const synthdata::Manifest train_set = synthdata::load_manifest(o.manifest);
  const synthdata::Manifest test_set = synthdata::load_manifest(o.test_manifest);
  adopt_dims(c, train_set);
  const fs::path out = o.out;
  echo_config(c, out);
  const auto arms = trainer::ablate(c.train, train_set, test_set, c.inference, out, {}, progress);
  const std::string table = trainer::ablation_table(arms);
  binary::write_file(out / "ablation.json", trainer::ablation_to_json(arms));
  binary::write_file(out / "ablation.txt", table);
  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"c2f: temporal action localization from first-occurrence and video labels"};
  app.require_subcommand(1);
  app.footer(run_config_help());
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", o.config, "JSON run config (sections corpus/model/loss/train/"
                                          "inference/eval)");
    auto* out = sub->add_option("--out", o.out, "output directory");
    if (needs_out) {
      out->required();
    }
    sub->add_option("--seed", o.seed, "overrides corpus.seed and train.seed");
    sub->footer(run_config_help());
  };

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic corpus with manifests and stats");
  add_common(gen, true);

  auto* stats = app.add_subcommand("stats", "presence report for a manifest");
  add_common(stats, false);
  stats->add_option("--manifest", o.manifest, "manifest JSON")->required();

  auto* train = app.add_subcommand("train", "train one model and write checkpoints");
  add_common(train, true);
  train->add_option("--manifest", o.manifest, "train manifest")->required();
  train->add_option("--mode", o.mode, "FO, FO+VL or FO+VL+PD (default from config)");

  auto* infer = app.add_subcommand("infer", "segment predictions from a checkpoint");
  add_common(infer, true);
  infer->add_option("--checkpoint", o.checkpoint, "model checkpoint")->required();
  infer->add_option("--manifest", o.manifest, "manifest of videos to score")->required();

  auto* ev = app.add_subcommand("eval", "mAP@IoU report for a predictions file");
  add_common(ev, true);
  ev->add_option("--predictions", o.predictions, "predictions JSON")->required();
  ev->add_option("--manifest", o.manifest, "manifest with ground truth")->required();
  ev->add_option("--protocol", o.protocol, "first-occurrence or all-occurrence");
  ev->add_option("--checkpoint", o.checkpoint, "model, for eval.score_curves");

  auto* abl = app.add_subcommand("ablate", "train and evaluate FO, FO+VL and FO+VL+PD");
  add_common(abl, true);
  abl->add_option("--manifest", o.manifest, "train manifest")->required();
  abl->add_option("--test-manifest", o.test_manifest, "test manifest")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen_data(o);
    if (*stats) return cmd_stats(o);
    if (*train) return cmd_train(o);
    if (*infer) return cmd_infer(o);
    if (*ev) return cmd_eval(o);
    if (*abl) return cmd_ablate(o);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "c2f: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "c2f: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 2;
}
