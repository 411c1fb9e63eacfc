#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "c2f/eval.hpp"
#include "c2f/model/model.hpp"
#include "c2f/numerics/kernels.hpp"
#include "c2f/rng.hpp"
#include "c2f/run_config.hpp"
#include "c2f/synthdata/generator.hpp"
#include "c2f/trainer.hpp"

using namespace c2f;

namespace {

std::vector<float> noise(Rng& r, std::size_t n) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(r.normal());
  return v;
}

// Default desk-scale model: D=32, conv 64, hidden {256, 128}.
model::ModelConfig desk_model() { return default_run_config().train.model; }

}  // namespace

static void BM_Conv1d(benchmark::State& state) {
  const std::size_t frames = state.range(0), depth = 32, width = 3, channels = 64;
  Rng r(1);
  const auto x = noise(r, frames * depth), w = noise(r, width * depth * channels),
             b = noise(r, channels);
  std::vector<float> out(frames * channels);
  for (auto _ : state) {
    numerics::kernels::conv1d(x, w, b, out, frames, depth, width, channels);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_Conv1d)->Arg(240)->Arg(3600);

static void BM_Forward(benchmark::State& state) {
  auto mc = desk_model();
  mc.max_frames = state.range(0);
  const auto params = model::init_params(mc, 1);
  Rng r(2);
  const numerics::Tensor features(numerics::Shape{mc.max_frames, mc.feature_dim},
                                  noise(r, mc.max_frames * mc.feature_dim));
  const std::vector<float> mask(mc.max_frames, 1.0f);
  for (auto _ : state) {
    auto bundle = model::forward(params, features, mask);
    benchmark::DoNotOptimize(bundle);
  }
}
BENCHMARK(BM_Forward)->Arg(240)->Unit(benchmark::kMicrosecond);

// One video's forward, loss and backward, as in a training step.
static void BM_TrainExample(benchmark::State& state) {
  RunConfig rc = default_run_config();
  rc.corpus.train_videos = 8;
  rc.corpus.test_videos = 0;
  rc.corpus.bg_only_fraction = 0.0;
  rc.corpus.seed = 3;
  const auto dir = std::filesystem::temp_directory_path() / "c2f_bench_corpus";
  const auto corpus = synthdata::write_corpus(rc.corpus, dir);
  const std::size_t first = 0;
  const auto batch = trainer::make_batch(corpus.train, std::span(&first, 1),
                                         rc.train.model.max_frames, rc.train.bg_fraction, 1);
  const auto example = batch.example(0);
  rc.train.mode = static_cast<trainer::Mode>(state.range(0));
  rc.train.model.heads = trainer::heads_for(rc.train.mode);
  auto params = model::init_params(rc.train.model, 1);
  for (auto _ : state) {
    auto loss = trainer::accumulate_example(params, example, rc.train, 1.0f);
    benchmark::DoNotOptimize(loss);
  }
  state.SetLabel(trainer::mode_name(rc.train.mode));
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_TrainExample)
    ->Arg(static_cast<int>(trainer::Mode::kFO))
    ->Arg(static_cast<int>(trainer::Mode::kFull))
    ->Unit(benchmark::kMillisecond);

static void BM_AveragePrecision(benchmark::State& state) {
  const std::size_t n = state.range(0), videos = 50;
  Rng r(4);
  std::vector<eval::RankedSegment> preds(n);
  std::vector<eval::TruthSegment> truth(n / 4);
  for (auto& p : preds) {
    const std::size_t s = r.below(220);
    p = {r.below(videos), s, s + 1 + r.below(20), r.uniform()};
  }
  for (auto& t : truth) {
    const std::size_t s = r.below(220);
    t = {r.below(videos), s, s + 5 + r.below(20)};
  }
  for (auto _ : state) {
    auto ap = eval::average_precision(preds, truth, 0.1);
    benchmark::DoNotOptimize(ap);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_AveragePrecision)->Arg(100)->Arg(2000);
BENCHMARK_MAIN();
