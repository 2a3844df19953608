#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace slowdiff;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "slowdiff");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("slowdiff_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

const char* kQuickRun =
    "kernel = 2@2\nkernel.form = raw\nm = 4\nh = 0.05\ndt = 1e-3\nT = 0.05\n"
    "init.type = barenblatt\ninit.tau = 0.15\nsnapshot_interval = 0.02\n";

}  // namespace

TEST_F(Cli, RunWritesObservablesAndSnapshots) {
  const auto cfg = write("run.cfg", kQuickRun);
  const auto r = invoke({"run", cfg, "--output-dir", (dir_ / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.err.empty());
  std::ifstream csv(dir_ / "out" / "observables.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header,
            "time,E_total,E_interaction,E_entropy,sup_density,support_diam,plateau_measure,max_velocity,w2_to_prev");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 4);  // t = 0, 0.02, 0.04, 0.05
  EXPECT_TRUE(fs::exists(dir_ / "out" / "snapshot_00000.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "snapshot_00003.txt"));
  EXPECT_FALSE(fs::exists(dir_ / "out" / "snapshot_00004.txt"));
}

TEST_F(Cli, RunIsByteIdenticalAcrossInvocations) {
  const auto cfg = write("run.cfg", kQuickRun);
  ASSERT_EQ(invoke({"run", cfg, "--output-dir", (dir_ / "a").string()}).code, 0);
  ASSERT_EQ(invoke({"run", cfg, "--output-dir", (dir_ / "b").string()}).code, 0);
  for (const char* f : {"observables.csv", "snapshot_00003.txt"})
    EXPECT_EQ(read_file((dir_ / "a" / f).string()), read_file((dir_ / "b" / f).string())) << f;
}

TEST_F(Cli, WassersteinOfShiftedSnapshot) {
  const auto e = init_barenblatt(2.0, 0.15, 1.0, 50);
  const auto a = write("a.snap", snapshot_text(0.0, e, 0.01));
  const auto b = write("b.snap", snapshot_text(0.0, e.translated({0.5}), 0.01));
  const auto r = invoke({"wasserstein", a, b, "--b", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(r.out), 0.5, 1e-14);
  EXPECT_EQ(invoke({"wasserstein", a, b, "--b", "1"}).code, 0);
  EXPECT_EQ(invoke({"wasserstein", a, b, "--b", "3"}).code, 1);
}

TEST_F(Cli, PhaseOfSnapshot) {
  const auto e = init_patch(-0.5, 0.5, 1.0, 1000);
  const auto p = write("p.snap", snapshot_text(0.0, e, epsilon_from_h(1e-3)));
  auto r = invoke({"phase", p});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("phase=solid ", 0), 0u) << r.out;
  r = invoke({"phase", p, "--epsilon", "0.5"});
  EXPECT_EQ(r.out.rfind("phase=liquid ", 0), 0u) << r.out;
}

TEST_F(Cli, SweepMWritesTable) {
  const auto cfg = write("m.cfg", "kernel = 2@2\nkernel.form = raw\nm = 2\nh = 0.04\ninit.type = barenblatt\n"
                                  "init.tau = 0.15\n");
  const auto r = invoke({"sweep-m", cfg, "--m-list", "2,4", "--output-dir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = read_file((dir_ / "m_sweep.csv").string());
  EXPECT_EQ(text.rfind("m,support_diam,sup_density,E_m,E_interaction\n2,", 0), 0u) << text;
}

TEST_F(Cli, ConfigErrorsExitOneWithOneLine) {
  const auto cfg = write("bad.cfg", std::string(kQuickRun) + "dt = -1\n");
  auto r = invoke({"run", cfg});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error=config key=dt ", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  r = invoke({"run", write("empty.cfg", "")});
  EXPECT_EQ(r.code, 1);
  r = invoke({"run", (dir_ / "missing.cfg").string()});
  EXPECT_EQ(r.code, 1);
  r = invoke({"frobnicate"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error=config key=argv ", 0), 0u) << r.err;
  r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
}

TEST_F(Cli, NumericalFailureExitsTwo) {
  const auto cfg = write("stiff.cfg",
                         "kernel = 1@2, -0.5@1\nm = 200\nscheme = euler\ninit.type = barenblatt\n"
                         "init.mass = 1.3\nT = 0.05\n");
  const auto r = invoke({"run", cfg, "--output-dir", dir_.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error=numerical key=", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(Cli, CriticalMassBracketErrorExitsTwo) {
  const auto cfg = write("cm.cfg",
                         "kernel = 1@2, -0.5@1\nm = 50\nh = 0.04\ntruncate = true\ninit.type = barenblatt\n"
                         "T = 40\n");
  const auto r = invoke({"sweep-critical-mass", cfg, "--q-list", "2.0", "--bracket", "1.4", "1.6",
                         "--output-dir", dir_.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error=numerical key=bracket ", 0), 0u) << r.err;
}
