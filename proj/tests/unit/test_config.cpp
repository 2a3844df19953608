#include <gtest/gtest.h>

#include <cstring>

#include "slowdiff/config.hpp"
#include "slowdiff/trajectory.hpp"

using namespace slowdiff;

namespace {

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a ConfigError for:\n" << text;
  return ConfigError("", "");
}

const char* kMinimal = "kernel = 1@2, -1@1\nm = 3\ninit.type = patch\n";

}  // namespace

TEST(ParseConfig, Fig2Reproduction) {
  const auto c = parse_config(
      "# Fig. 2\n"
      "kernel = 1@2, -1@1   # |x|^2/2 - |x|\n"
      "m = 800\n"
      "h = 0.004\n"
      "dt = 1e-4\n"
      "init.type = patch\n"
      "init.left = -1\n"
      "init.right = 1\n");
  EXPECT_EQ(c.m, 800.0);
  EXPECT_EQ(c.h, 0.004);
  EXPECT_EQ(c.dt, 1e-4);
  ASSERT_EQ(c.kernel_terms.size(), 2u);
  EXPECT_EQ(c.kernel().attraction_exponent(), 2.0);
  EXPECT_EQ(c.kernel().repulsion_exponent(), 1.0);
  EXPECT_EQ(c.kernel().eval<1>({2.0}), 0.0);
  EXPECT_EQ(c.init_type, InitType::patch);
  EXPECT_EQ(c.particle_count(), 500u);
  EXPECT_NEAR(c.mollifier().epsilon(), 0.0040222, 1e-7);
}

TEST(ParseConfig, ShippedConfigsParse) {
  for (const char* name : {"fig1.cfg", "fig2.cfg", "critical_mass.cfg"}) {
    const auto c = parse_config(read_file(std::string(SLOWDIFF_SOURCE_DIR) + "/configs/" + name));
    EXPECT_GT(c.m, 1.0) << name;
  }
  const auto fig1 = parse_config(read_file(std::string(SLOWDIFF_SOURCE_DIR) + "/configs/fig1.cfg"));
  EXPECT_EQ(fig1.kernel().eval<1>({1.0}), 2.0);
}

TEST(ParseConfig, DefaultsApply) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.h, 0.01);
  EXPECT_EQ(c.epsilon_exponent, 0.999);
  EXPECT_EQ(c.delta, 0.05);
  EXPECT_EQ(c.steady_tol, 1e-3);
  EXPECT_EQ(c.scheme, Scheme::semi_implicit);
  EXPECT_EQ(c.patch, (PatchInit{-1.0, 1.0, 1.0}));
  EXPECT_TRUE(c.deterministic);
}

TEST(ParseConfig, EmptyFileNamesMissingKeys) {
  const auto e = config_error("");
  const std::string what = e.what();
  for (const char* k : {"kernel", "m", "init.type"}) EXPECT_NE(what.find(k), std::string::npos) << k;
}

TEST(ParseConfig, ConstraintViolationsNameTheKey) {
  EXPECT_EQ(config_error(std::string(kMinimal) + "dt = -1\n").key(), "dt");
  EXPECT_EQ(config_error("kernel = 1@2\nm = 1\ninit.type = patch\n").key(), "m");
  EXPECT_EQ(config_error(std::string(kMinimal) + "h = 0\n").key(), "h");
  EXPECT_EQ(config_error(std::string(kMinimal) + "delta = 1.5\n").key(), "delta");
  EXPECT_EQ(config_error(std::string(kMinimal) + "init.left = 2\n").key(), "init.right");
  EXPECT_EQ(config_error("kernel = 1@2.4, -1@1\nm = 3\ninit.type = patch\n").key(), "kernel");
  EXPECT_EQ(config_error("kernel = 1@1.5, -1@1.5\nm = 3\ninit.type = patch\nkernel.unsafe = true\n").key(), "kernel");
  EXPECT_NO_THROW(parse_config("kernel = 1@2.4, -1@1\nkernel.unsafe = true\nm = 3\ninit.type = patch\n"));
}

TEST(ParseConfig, SyntaxAndTypeErrorsCarryLineNumbers) {
  auto e = config_error("kernel = 1@2\nm 3\n");
  EXPECT_EQ(e.line(), 2);
  e = config_error("kernel = 1@2\nm = three\ninit.type = patch\n");
  EXPECT_EQ(e.key(), "m");
  EXPECT_EQ(e.line(), 2);
  e = config_error(std::string(kMinimal) + "bogus = 1\n");
  EXPECT_EQ(e.key(), "bogus");
  EXPECT_EQ(e.line(), 4);
  e = config_error(std::string(kMinimal) + "m = 4\n");
  EXPECT_EQ(e.line(), 4);
  EXPECT_EQ(config_error(std::string(kMinimal) + "N = 2.5\n").key(), "N");
  EXPECT_EQ(config_error(std::string(kMinimal) + "truncate = maybe\n").key(), "truncate");
  EXPECT_EQ(config_error(std::string(kMinimal) + "scheme = rk4\n").key(), "scheme");
  EXPECT_EQ(config_error("kernel = 1@2\nm = 3\ninit.type = disk\n").key(), "init.type");
  EXPECT_EQ(config_error("kernel = 1x2\nm = 3\ninit.type = patch\n").key(), "kernel");
  EXPECT_EQ(config_error(std::string(kMinimal) + "init.tau = 0.1\n").key(), "init.tau");
}

TEST(ParseConfig, RoundTrip) {
  auto c = parse_config(
      "kernel = 2@2\nkernel.form = raw\nm = 4\nh = 0.007\ndt = 1e-4\nT = 10\n"
      "init.type = barenblatt\ninit.m_star = 2\ninit.tau = 0.15\ninit.mass = 3\n"
      "scheme = heun\ntruncate = true\nsnapshot_interval = 0.25\noutput_dir = out/x\n");
  EXPECT_EQ(parse_config(emit_config(c)), c);
  c.kernel_terms = {{1.0 / 3.0, 1.6}, {-0.1, 1.0}};
  c.unsafe_params = true;
  c.delta = 0.1 + 1e-17;
  c.n = 123;
  EXPECT_EQ(parse_config(emit_config(c)), c);
  const auto p = parse_config(std::string(kMinimal) + "init.mass = 0.9\nstop_at_steady = false\n");
  EXPECT_EQ(parse_config(emit_config(p)), p);
}

TEST(Csv, RealsRoundTripBitExactly) {
  std::vector<ObservableRow> rows(2);
  rows[0] = {0.0, -1.0 / 3.0, 0.1, 2.0 / 7.0, 1e-300, 3.14159, 0.0, 5e-324, 1.0 - 1e-16};
  rows[1] = {1e3, std::nextafter(1.0, 2.0), -0.0, 1e300, 0.5, 2.0, 1.0, 0.1 + 0.2, 7.0};
  const auto text = observables_csv(rows);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "time,E_total,E_interaction,E_entropy,sup_density,support_diam,plateau_measure,max_velocity,w2_to_prev");
  for (const auto& r : rows) {
    std::getline(in, line);
    std::vector<double> got;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) got.push_back(std::strtod(cell.c_str(), nullptr));
    const std::vector<double> want = {r.time, r.e_total, r.e_interaction, r.e_entropy, r.sup_density,
                                      r.support_diam, r.plateau_measure, r.max_velocity, r.w2_to_prev};
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(std::memcmp(&got[i], &want[i], sizeof(double)), 0) << i;
  }
}

TEST(Snapshot, RoundTrip) {
  const auto e = init_barenblatt(2.0, 0.15, 1.0 / 3.0, 17);
  const auto text = snapshot_text(0.125, e, 0.0070348);
  EXPECT_EQ(text.rfind("# t=0.125 mass=", 0), 0u);
  const auto s = parse_snapshot(text);
  EXPECT_EQ(s.time, 0.125);
  EXPECT_EQ(s.epsilon, 0.0070348);
  EXPECT_EQ(s.mass, e.mass());
  ASSERT_EQ(s.ensemble.size(), e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_EQ(s.ensemble.positions()[i], e.positions()[i]);
    EXPECT_EQ(s.ensemble.weights()[i], e.weights()[i]);
  }
  EXPECT_THROW(parse_snapshot("0.1 1\n"), ConfigError);
  EXPECT_THROW(parse_snapshot("# t=0 mass=1 epsilon=0.1\n0.1\n"), ConfigError);
  EXPECT_THROW(parse_snapshot("# t=0 mass=1 epsilon=0.1\n0.1 -1\n"), ConfigError);
}
