#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "phimin/io.hpp"

namespace fs = std::filesystem;
using namespace phimin;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("phimin_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int phimin_exe(const std::string& args) {
  const std::string cmd = std::string(PHIMIN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST(Executable, RequiresSubcommand) { EXPECT_NE(phimin_exe(""), 0); }

TEST(Executable, LambdaWithSetOverrides) {
  const auto d = scratch("lambda");
  ASSERT_EQ(phimin_exe("lambda --out " + d.string() + " --set profile.kind=log --set profile.params=2 --set u0=1"), 0);
  const auto j = io::read_json((d / "lambda.json").string());
  EXPECT_NEAR(io::num_of(j.at("lambda")), 1.31103, 1e-4);
  EXPECT_TRUE(j.at("finite").get<bool>());
}

TEST(Executable, ConfigFileAndFlags) {
  const auto d = scratch("config");
  {
    std::ofstream f(d / "run.cfg");
    f << "profile.kind = linear\nprofile.params = 1\nn_theta = 16\n";
  }
  ASSERT_EQ(phimin_exe("bowl --config " + (d / "run.cfg").string() + " --out " + d.string() + " --format ply"), 0);
  EXPECT_TRUE(fs::exists(d / "bowl.ply"));
  EXPECT_TRUE(fs::exists(d / "bowl_curve.csv"));
}

TEST(Executable, VerifyPositional) {
  const auto d = scratch("verify");
  ASSERT_EQ(phimin_exe("profile --out " + d.string()), 0);
  EXPECT_EQ(phimin_exe("verify " + (d / "profile.csv").string() + " --out " + d.string()), 0);
  EXPECT_EQ(phimin_exe("verify " + (d / "missing.csv").string() + " --out " + d.string()), 1);
}

TEST(Executable, ValidationExitCode) {
  const auto d = scratch("invalid");
  EXPECT_EQ(phimin_exe("bowl --out " + d.string() + " --set profile.kind=log --set profile.params=-1 --set z0=1"), 1);
  EXPECT_EQ(phimin_exe("bowl --out " + d.string() + " --grid 2x2"), 1);
  EXPECT_TRUE(fs::exists(d / "error.json"));
}

TEST(Executable, GalleryWritesEveryPreset) {
  const auto d = scratch("gallery");
  ASSERT_EQ(phimin_exe("gallery --out " + d.string()), 0);
  const auto j = io::read_json((d / "gallery.json").string());
  ASSERT_TRUE(j.contains("presets"));
  EXPECT_GE(j.at("presets").size(), 8u);
  for (const auto& e : j.at("presets")) {
    EXPECT_EQ(e.at("exit_code").get<int>(), 0) << e.dump();
    EXPECT_TRUE(fs::is_directory(d / e.at("name").get<std::string>()));
  }
}
