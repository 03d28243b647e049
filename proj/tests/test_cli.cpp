#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cgm/config.hpp"
#include "cgm/run.hpp"

using namespace cgm;
namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(CGM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cgm_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, UsageAndErrors) {
  EXPECT_EQ(cli(""), kExitUsage);
  EXPECT_EQ(cli("--bogus-flag"), kExitUsage);
  EXPECT_EQ(cli("shape --preset nope"), kExitConfig);
  EXPECT_EQ(cli("frobnicate --preset rost --out " + scratch("bad").string()), kExitConfig);
  EXPECT_EQ(cli("--config /nonexistent/cfg.json"), kExitConfig);
}

TEST(Cli, ShapeFig1b) {
  const auto dir = scratch("fig1b");
  EXPECT_EQ(cli("shape --preset fig1b --out " + dir.string()), kExitOk);
  const std::string b = slurp(dir / "boundary.csv");
  EXPECT_NE(b.find("spike_v"), std::string::npos);
  EXPECT_NE(b.find("flat_v"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "run.json"));
  const auto m = Json::parse(slurp(dir / "run.json"));
  EXPECT_EQ(m["command"], "shape");
}

TEST(Cli, CenteringViaOptionAndGrid) {
  const auto dir = scratch("centering");
  EXPECT_EQ(cli("centering --preset rost --grid 2x1 --out " + dir.string()), kExitOk);
  EXPECT_NE(slurp(dir / "centering.csv").find("5.828427"), std::string::npos);
  EXPECT_EQ(cli("centering --preset rost --grid 2y1 --out " + dir.string()), kExitConfig);
}

TEST(Config, PresetsExpand) {
  for (const auto& p : preset_names()) {
    Json j{{"preset", p}};
    const RunConfig c = config_from_json(j);
    EXPECT_EQ(c.preset, p);
    if (p != "rains-squares") {
      EXPECT_EQ(c.m, 4000u);
      EXPECT_EQ(c.t, 1000.0);
      const ParamPair pp = params_of(c, 200, 200);
      EXPECT_EQ(pp.b().value(200, 7), 0.5);
    }
  }
  const ParamPair d = params_of(config_from_json(Json{{"preset", "fig1d"}}), 200, 200);
  EXPECT_EQ(d.a().value(99, 50), -0.25);
  EXPECT_EQ(d.a().value(150, 100), 0.0);
  EXPECT_EQ(d.a().value(150, 50), 0.5);
  // Small grids drop the regime that starts past the cap.
  const ParamPair small = params_of(config_from_json(Json{{"preset", "fig1d"}}), 30, 30);
  EXPECT_EQ(small.a().value(30, 7), 0.5);
  EXPECT_NO_THROW(params_of(config_from_json(Json{{"preset", "fig1d"}}), 400, 400));
  const ParamPair cc = params_of(config_from_json(Json{{"preset", "fig1c"}}), 200, 200);
  EXPECT_EQ(cc.a().value(120, 50), 0.25);
  EXPECT_EQ(cc.a().value(120, 100), 0.0);
}

TEST(Config, ExplicitKeysOverridePreset) {
  const Json j = Json::parse(R"({"preset": "rost", "grid": {"m": 30, "n": 20}, "t": "12.5", "seed": "99",
                                 "a": {"kind": "constant", "value": "0.75"}})");
  const RunConfig c = config_from_json(j);
  EXPECT_EQ(c.m, 30u);
  EXPECT_EQ(c.n, 20u);
  EXPECT_EQ(c.t, 12.5);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(params_of(c, 30, 20).a().value(30, 3), 0.75);
  EXPECT_THROW(config_from_json(Json::array()), ConfigError);
}

TEST(Config, SpecRoundTrip) {
  const ShapeSpec s(TransformPair(Measure1D({{0.2, 0.25}, {0.7, 0.75}}), Measure1D({}, {{0.5, 1.5, 1.0}}), 0.1, 0.5),
                    0.2, 0.5);
  const ShapeSpec back = spec_from_json(spec_to_json(s));
  EXPECT_EQ(spec_to_json(back).dump(), spec_to_json(s).dump());
  EXPECT_EQ(gamma(back, 1.3, 0.4), gamma(s, 1.3, 0.4));
}

TEST(Config, RunIsReproducible) {
  Json j = Json::parse(R"({"command": "simulate", "preset": "fig1b", "grid": {"N": 150}, "t": "40"})");
  auto c = config_from_json(j);
  c.out = scratch("rep1").string();
  c.threads = 1;
  const auto r1 = run(c);
  c.out = scratch("rep2").string();
  c.threads = 2;
  const auto r2 = run(c);
  EXPECT_EQ(r1.status, kExitOk);
  EXPECT_EQ(r1.manifest["artifacts"].dump(), r2.manifest["artifacts"].dump());
  EXPECT_EQ(r1.manifest["config_hash"], r2.manifest["config_hash"]);
  const std::string pgm = slurp(fs::path(c.out) / "cluster.pgm");
  EXPECT_EQ(pgm.rfind("P5\n150 150\n1\n", 0), 0u);
}

TEST(Config, ExitStatusMapping) {
  EXPECT_EQ(exit_status_for(DomainError("x")), kExitDomain);
  EXPECT_EQ(exit_status_for(InsufficientExtent("x")), kExitResource);
  EXPECT_EQ(exit_status_for(DivergenceError("x")), kExitNumerical);
  EXPECT_EQ(exit_status_for(ValidationError("x")), kExitData);
  EXPECT_EQ(exit_status_for(InvalidParameters("x")), kExitInvalidParameters);
}
