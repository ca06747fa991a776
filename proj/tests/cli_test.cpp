#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    // one directory per process so ctest -j runs do not collide
    fs::path d = fs::temp_directory_path() / ("pcap_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& log = "log.txt") {
  const std::string cmd = std::string(PCAP_CLI) + " " + args + " > " + (scratch() / log).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

// Coarse ball mesh keeps each solve to a second or two.
const std::string kBall = "--body ball:1 --p 2 --h 0.06 ";

}  // namespace

TEST(Cli, SolveWritesManifestLast) {
  const fs::path out = scratch() / "solve";
  ASSERT_EQ(run("solve " + kBall + "--out " + out.string()), 0) << slurp(scratch() / "log.txt");
  ASSERT_TRUE(fs::exists(out / "field.csv"));
  const auto m = manifest(out);
  EXPECT_EQ(m.at("command"), "solve");
  EXPECT_EQ(m.at("config").at("body"), "ball:1");
  const auto last = fs::last_write_time(out / "manifest.json");
  for (const auto& a : m.at("artifacts")) {
    ASSERT_TRUE(fs::exists(out / a.get<std::string>())) << a;
    EXPECT_LE(fs::last_write_time(out / a.get<std::string>()), last);
  }
  EXPECT_TRUE(m.at("solver").contains("field"));
}

TEST(Cli, ConfigErrors) {
  EXPECT_EQ(run("solve --body cube:1 --out " + (scratch() / "bad").string()), 2);
  EXPECT_EQ(run("solve --body ball:1 --p 3 --n 3 --out " + (scratch() / "bad").string()), 2);
  EXPECT_EQ(run("solve --bogus-flag"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("capacity --config " + (scratch() / "missing.json").string()), 2);
  std::ofstream(scratch() / "unknown.json") << R"({"body": "ball:1", "colour": "red"})";
  EXPECT_EQ(run("capacity --config " + (scratch() / "unknown.json").string()), 2);
}

TEST(Cli, CorruptFieldIsArtifactError) {
  std::ofstream(scratch() / "corrupt.csv") << "#pcap-field=1\n#body=ball:1\nr,z,u\n1,0,1\n";
  EXPECT_EQ(run("check --field " + (scratch() / "corrupt.csv").string() + " --out " + (scratch() / "c").string()), 3);
  std::ofstream(scratch() / "garbage.csv") << "hello\n";
  EXPECT_EQ(run("capacity --field " + (scratch() / "garbage.csv").string() + " --out " + (scratch() / "c").string()),
            3);
}

TEST(Cli, CheckSweepCapacityOnBall) {
  const fs::path solved = scratch() / "solve" / "field.csv";
  if (!fs::exists(solved)) ASSERT_EQ(run("solve " + kBall + "--out " + (scratch() / "solve").string()), 0);

  const fs::path chk = scratch() / "check";
  ASSERT_EQ(run("check --q 2,inf --field " + solved.string() + " --out " + chk.string()), 0)
      << slurp(scratch() / "log.txt");
  const auto reports = nlohmann::json::parse(slurp(chk / "inequalities.json"));
  ASSERT_FALSE(reports.empty());
  for (const auto& r : reports) EXPECT_TRUE(r.at("equality_expected").get<bool>()) << r;
  EXPECT_TRUE(fs::exists(chk / "inequalities.csv"));

  const fs::path sw = scratch() / "sweep";
  ASSERT_EQ(run("sweep --q 1.2,2 --tgrid log:0.1,0.9,5 --no-companion --field " + solved.string() + " --out " +
                sw.string()),
            0)
      << slurp(scratch() / "log.txt");
  const auto sweep = nlohmann::json::parse(slurp(sw / "sweep.json"));
  EXPECT_EQ(sweep.at("profiles")[0].at("lambda"), false);
  EXPECT_EQ(sweep.at("profiles")[1].at("lambda"), true);
  EXPECT_EQ(sweep.at("profiles")[1].at("monotone_ok"), true);
  EXPECT_TRUE(fs::exists(sw / "profile_q1.2.csv"));
  EXPECT_TRUE(fs::exists(sw / "profile_q2.csv"));

  const fs::path cap = scratch() / "capacity";
  ASSERT_EQ(run("capacity --format json --field " + solved.string() + " --out " + cap.string()), 0);
  const auto est = nlohmann::json::parse(slurp(cap / "capacity.json"));
  EXPECT_NEAR(est.at("consensus").get<double>(), 1.0, 0.03);
}

TEST(Cli, Identities) {
  const fs::path out = scratch() / "identities";
  ASSERT_EQ(run("identities --numeric --out " + out.string(), "ident.txt"), 0);
  EXPECT_NE(slurp(scratch() / "ident.txt").find("warning"), std::string::npos);
  const std::string csv = slurp(out / "identities.csv");
  EXPECT_EQ(csv.find("kato_field"), std::string::npos);
  EXPECT_EQ(csv.rfind("name,n,p,r,residual,scale,relative\n", 0), 0u);
}

TEST(Cli, ConfigFileAndFlagsOverride) {
  std::ofstream(scratch() / "run.json") << R"({"body": "ball:2", "p": 2, "mesh": {"h": 0.5}, "formats": ["json"]})";
  const fs::path out = scratch() / "cfg";
  ASSERT_EQ(run("capacity --config " + (scratch() / "run.json").string() + " --body ball:1 --h 0.06 --out " +
                out.string()),
            0)
      << slurp(scratch() / "log.txt");
  const auto m = manifest(out);
  EXPECT_EQ(m.at("config").at("body"), "ball:1");
  EXPECT_EQ(m.at("config").at("mesh").at("h"), 0.06);
  EXPECT_EQ(m.at("config").at("formats"), nlohmann::json::array({"json"}));
}

TEST(Cli, Deterministic) {
  const fs::path a = scratch() / "det_a", b = scratch() / "det_b";
  const std::string args = "sweep " + kBall + "--q 2 --tgrid log:0.2,0.8,4 --no-companion --out ";
  ASSERT_EQ(run(args + a.string()), 0);
  ASSERT_EQ(run(args + b.string()), 0);
  for (const char* f : {"field.csv", "profile_q2.csv", "sweep.json"}) {
    if (!fs::exists(a / f)) continue;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(slurp(a / "sweep.json"), slurp(b / "sweep.json"));
  auto ma = manifest(a), mb = manifest(b);
  ma.erase("timings_s");
  mb.erase("timings_s");
  ma["config"].erase("out");
  mb["config"].erase("out");
  EXPECT_EQ(ma, mb);
}
