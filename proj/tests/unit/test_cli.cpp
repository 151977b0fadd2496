#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../../tools/app.hpp"
#include "wdl/manifest.hpp"

namespace {

namespace fs = std::filesystem;
using wdl::RunManifest;

struct Run {
  int code;
  std::string out, err;
};

Run wdlab(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  const int c = wdl::app::run(args, o, e);
  return {c, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("wdl_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path small_config(const fs::path& dir) {
  const auto path = dir / "small.ini";
  std::ofstream(path) << "[model]\ngamma = 0.25\n\n[solver]\nT = 0.1\nsnapshots = 2\ngrid_N = 256\n"
                         "epsilon = 0.3\n\n[experiment]\nplan = frac_default\n";
  return path;
}

TEST(Cli, UsageAndConfigErrors) {
  EXPECT_EQ(wdlab({}).code, 2);
  EXPECT_EQ(wdlab({"--help"}).code, 0);
  EXPECT_EQ(wdlab({"frobnicate"}).code, 2);
  const auto missing = wdlab({"propagate"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("--config"), std::string::npos);
  const auto dir = scratch("errors");
  std::ofstream(dir / "bad.ini") << "[model]\nalpha = 2\n";
  EXPECT_EQ(wdlab({"propagate", "--config", (dir / "bad.ini").string(), "--out", dir.string()}).code, 2);
  EXPECT_EQ(wdlab({"propagate", "--config", (dir / "none.ini").string()}).code, 2);
  EXPECT_EQ(wdlab({"propagate", "--config", small_config(dir).string(), "--jobs", "0"}).code, 2);
}

TEST(Cli, PropagateWritesArraysAndManifest) {
  const auto dir = scratch("propagate");
  const auto r = wdlab({"propagate", "--config", small_config(dir).string(), "--out", (dir / "run").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = RunManifest::read(dir / "run" / "manifest.json");
  EXPECT_EQ(m.subcommand, "propagate");
  EXPECT_FALSE(m.outputs.empty());
  for (const auto& o : m.outputs) {
    ASSERT_TRUE(fs::exists(dir / "run" / o.path)) << o.path;
    EXPECT_EQ(wdl::sha256_file(dir / "run" / o.path), o.sha256);
  }
  EXPECT_TRUE(fs::exists(dir / "run" / "field_000.wdlb"));
  EXPECT_TRUE(fs::exists(dir / "run" / "diagnostics.csv"));
}

TEST(Cli, OutputsDoNotDependOnJobs) {
  const auto dir = scratch("jobs");
  const auto cfg = small_config(dir).string();
  ASSERT_EQ(wdlab({"wigner", "--config", cfg, "--out", (dir / "a").string(), "--jobs", "1"}).code, 0);
  ASSERT_EQ(wdlab({"wigner", "--config", cfg, "--out", (dir / "b").string(), "--jobs", "3"}).code, 0);
  const auto a = RunManifest::read(dir / "a" / "manifest.json");
  const auto b = RunManifest::read(dir / "b" / "manifest.json");
  ASSERT_EQ(a.outputs.size(), b.outputs.size());
  for (std::size_t i = 0; i < a.outputs.size(); ++i) EXPECT_EQ(a.outputs[i].sha256, b.outputs[i].sha256);
}

TEST(Cli, ReplayReproducesAndDetectsTampering) {
  const auto dir = scratch("replay");
  ASSERT_EQ(wdlab({"synthesize", "--config", small_config(dir).string(), "--out", (dir / "run").string(),
                   "--seed", "42"})
                .code,
            0);
  const auto manifest = dir / "run" / "manifest.json";
  const auto r = wdlab({"replay", "--manifest", manifest.string(), "--out", (dir / "again").string(), "--jobs", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  auto m = RunManifest::read(manifest);
  EXPECT_EQ(m.seed, 42u);
  m.outputs.front().sha256[0] = m.outputs.front().sha256[0] == '0' ? '1' : '0';
  m.write(dir / "tampered.json");
  EXPECT_EQ(wdlab({"replay", "--manifest", (dir / "tampered.json").string(), "--out", (dir / "t").string()}).code, 3);
}

TEST(Cli, SampleSubcommand) {
  const auto dir = scratch("sample");
  const auto cfg = small_config(dir).string();
  for (const char* model : {"direction", "fbm", "levy"}) {
    const auto r = wdlab({"sample", "--config", cfg, "--model", model, "--count", "50", "--out",
                          (dir / model).string()});
    EXPECT_EQ(r.code, 0) << model << r.err;
  }
}

}  // namespace
