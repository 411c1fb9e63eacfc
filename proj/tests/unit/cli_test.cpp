#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "c2f/binary_io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "c2f_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& log = "log.txt") {
  const std::string cmd =
      std::string(C2F_CLI_PATH) + " " + args + " > " + (work() / log).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const fs::path& p) { return c2f::binary::read_file(p); }

void write_config() {
  c2f::binary::write_file(work() / "small.json", R"({
  "corpus": {"train_videos": 10, "test_videos": 5, "frames": 60, "feature_dim": 6,
             "presence": [0.06, 0.04, 0.08, 0.05], "mean_duration": [6, 5, 8, 6]},
  "model": {"max_frames": 60, "conv_channels": 4, "hidden": [8]},
  "train": {"epochs": 1, "batch_size": 4}
})");
}

}  // namespace

TEST(Cli, HelpListsConfigKeys) {
  EXPECT_EQ(run("--help", "help.txt"), 0);
  const std::string h = read(work() / "help.txt");
  for (const char* s : {"gen-data", "ablate", "train.learning_rate", "eval.protocol"})
    EXPECT_NE(h.find(s), std::string::npos) << s;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("gen-data --config /nonexistent/x.json --out " + (work() / "x").string()), 3);
  c2f::binary::write_file(work() / "bad.json", R"({"train": {"epochz": 1}})");
  EXPECT_EQ(run("gen-data --config " + (work() / "bad.json").string() + " --out " +
                (work() / "x").string()),
            2);
  EXPECT_NE(read(work() / "log.txt").find("epochz"), std::string::npos);
  EXPECT_EQ(run("stats --manifest /nonexistent/m.json --out " + (work() / "x").string()), 3);
}

TEST(Cli, PipelineEndToEnd) {
  write_config();
  const std::string cfg = " --config " + (work() / "small.json").string();
  const fs::path data = work() / "data", tr = work() / "train", inf = work() / "infer",
                 ev = work() / "eval";
  ASSERT_EQ(run("gen-data" + cfg + " --seed 3 --out " + data.string()), 0);
  EXPECT_TRUE(fs::exists(data / "stats.json"));
  EXPECT_TRUE(fs::exists(data / "resolved_config.json"));
  ASSERT_EQ(run("train" + cfg + " --manifest " + (data / "train.json").string() + " --out " +
                tr.string()),
            0);
  ASSERT_EQ(run("infer" + cfg + " --checkpoint " + (tr / "model.c2fck").string() +
                " --manifest " + (data / "test.json").string() + " --out " + inf.string()),
            0);
  ASSERT_EQ(run("eval" + cfg + " --predictions " + (inf / "predictions.json").string() +
                " --manifest " + (data / "test.json").string() + " --out " + ev.string()),
            0);
  EXPECT_TRUE(fs::exists(ev / "report_all-occurrence.json"));
  EXPECT_EQ(run("eval --protocol first-occurrence --predictions " +
                (inf / "predictions.json").string() + " --manifest " +
                (data / "test.json").string() + " --out " + ev.string()),
            0);
  EXPECT_TRUE(fs::exists(ev / "report_first-occurrence.txt"));
  // A test video the train manifest does not have.
  c2f::binary::write_file(work() / "stray.json", R"({"format": "c2f-predictions", "version": 1,
  "predictions": [{"video": "test_0000", "class": 0, "start": 2, "end": 9, "score": 0.5}]})");
  EXPECT_EQ(run("eval --protocol first-occurrence --predictions " +
                (work() / "stray.json").string() + " --manifest " +
                (data / "train.json").string() + " --out " + ev.string()),
            2);
  // A D=6 model cannot score a D=5 corpus.
  c2f::binary::write_file(work() / "narrow.json", R"({
  "corpus": {"train_videos": 4, "test_videos": 2, "frames": 60, "feature_dim": 5,
             "presence": [0.06, 0.04, 0.08, 0.05], "mean_duration": [6, 5, 8, 6]}})");
  ASSERT_EQ(run("gen-data --config " + (work() / "narrow.json").string() + " --out " +
                (work() / "narrow").string()),
            0);
  EXPECT_EQ(run("infer --checkpoint " + (tr / "model.c2fck").string() + " --manifest " +
                (work() / "narrow" / "test.json").string() + " --out " + inf.string()),
            2);
  EXPECT_NE(read(work() / "log.txt").find("feature_dim"), std::string::npos);
}
