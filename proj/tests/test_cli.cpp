#include <gtest/gtest.h>

#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nvsim/cli.hpp"
#include "nvsim/csv.hpp"

using namespace nvsim;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(NVSIM_SOURCE_DIR) + "/configs/";

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nvsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("nvsim_") + info->name());
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

using CliTest = TempDir;

TEST_F(CliTest, EsrRunFindsDip) {
  const auto r = cli({"run", "esr", "--config", kConfigs + "esr_100G.cfg", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"esr.csv", "report.txt", "manifest.txt"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  const Trace t = read_csv(dir / "esr.csv");
  const auto& ipl = t.column("I_pl");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < ipl.size(); ++i) {
    if (ipl[i] < ipl[arg]) arg = i;
  }
  EXPECT_LE(std::abs(t.x[arg] - 2600.1), t.x[1] - t.x[0]);
  const std::string manifest = slurp(dir / "manifest.txt");
  EXPECT_NE(manifest.find("config_checksum"), std::string::npos);
  EXPECT_NE(manifest.find("esr.csv"), std::string::npos);
}

TEST_F(CliTest, ByteIdenticalAcrossRunsAndThreads) {
  const fs::path a = dir / "a", b = dir / "b";
  ASSERT_EQ(cli({"run", "echo", "--config", kConfigs + "standard.cfg", "--out", a.string(), "--threads", "1"}).code, 0);
  ASSERT_EQ(cli({"run", "echo", "--config", kConfigs + "standard.cfg", "--out", b.string(), "--threads", "4"}).code, 0);
  EXPECT_EQ(slurp(a / "echo.csv"), slurp(b / "echo.csv"));
  EXPECT_EQ(slurp(a / "echo_tau2.csv"), slurp(b / "echo_tau2.csv"));
}

TEST_F(CliTest, SeedOverrideChangesChecksum) {
  const auto r1 = cli({"run", "levels", "--config", kConfigs + "levels.cfg", "--out", (dir / "1").string()});
  const auto r2 = cli({"run", "levels", "--config", kConfigs + "levels.cfg", "--out", (dir / "2").string(),
                       "--seed", "7"});
  ASSERT_EQ(r1.code, 0);
  ASSERT_EQ(r2.code, 0);
  auto checksum = [](const std::string& m) {
    const auto p = m.find("config_checksum");
    return m.substr(p, m.find('\n', p) - p);
  };
  EXPECT_NE(checksum(r1.out), checksum(r2.out));
}

TEST_F(CliTest, UsageAndConfigErrorsExitOne) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"run", "nonsense", "--config", kConfigs + "standard.cfg", "--out", dir.string()}).code, 1);
  EXPECT_EQ(cli({"run", "esr", "--out", dir.string()}).code, 1);
  EXPECT_EQ(cli({"run", "esr", "--config", (dir / "missing.cfg").string(), "--out", dir.string()}).code, 1);
  write_file(dir / "bad.cfg", "nv.b_gauss = 100\ngfactor = 2\n");
  const auto r = cli({"run", "esr", "--config", (dir / "bad.cfg").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("nv.g"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST_F(CliTest, HelpListsSchema) {
  const auto r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("noise.sigma_static_mhz"), std::string::npos);
  EXPECT_NE(r.out.find("not from paper"), std::string::npos);
}

TEST_F(CliTest, RuntimeFailureRemovesPartialOutputs) {
  // the fit experiment reads fit.input after the directory exists; a 3-row CSV fails
  write_file(dir / "short.csv", "t_us,y\n0,1\n1,0.5\n2,0.25\n");
  write_file(dir / "fit.cfg", "fit.model = exp_decay\nfit.input = " + (dir / "short.csv").string() + "\n");
  const fs::path out = dir / "out";
  const auto r = cli({"run", "fit", "--config", (dir / "fit.cfg").string(), "--out", out.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("insufficient data"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, FitInsufficientDataExitsTwo) {
  write_file(dir / "short.csv", "t_us,y\n0,1\n1,0.5\n2,0.25\n");
  const auto r = cli({"fit", "exp_decay", (dir / "short.csv").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("insufficient data"), std::string::npos);
  EXPECT_EQ(cli({"fit", "polynomial", (dir / "short.csv").string()}).code, 1);
  write_file(dir / "junk.csv", "1,2\n3,4\n");
  EXPECT_EQ(cli({"fit", "exp_decay", (dir / "junk.csv").string()}).code, 2);
}

TEST_F(CliTest, EchoRoundTripThroughFit) {
  ASSERT_EQ(cli({"run", "echo", "--config", kConfigs + "standard.cfg", "--out", dir.string()}).code, 0);
  const FitResult f = fit_file(dir / "echo.csv", "exp_decay");
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.param("T_us") / 6.0, 1.0, 0.05);
  const auto r = cli({"fit", "exp_decay", (dir / "echo.csv").string(), "--out", (dir / "fit.txt").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(slurp(dir / "fit.txt"), r.out);
  EXPECT_NE(r.out.find("T_us"), std::string::npos);
}

TEST_F(CliTest, RabiRoundTripThroughFit) {
  ASSERT_EQ(cli({"run", "rabi", "--config", kConfigs + "rabi_lownoise.cfg", "--out", dir.string()}).code, 0);
  const FitResult f = fit_file(dir / "rabi.csv", "damped_cosine");
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.param("f1_mhz") / 3.0, 1.0, 0.01);
  EXPECT_THROW(fit_file(dir / "rabi.csv", "damped_cosine", "nope"), CsvError);
}

TEST_F(CliTest, FitExperimentFromConfig) {
  ASSERT_EQ(cli({"run", "echo", "--config", kConfigs + "standard.cfg", "--out", (dir / "e").string()}).code, 0);
  write_file(dir / "fit.cfg", "fit.model = exp_decay\nfit.column = I_pl\nfit.input = " +
                                  (dir / "e" / "echo.csv").string() + "\n");
  ASSERT_EQ(cli({"run", "fit", "--config", (dir / "fit.cfg").string(), "--out", (dir / "f").string()}).code, 0);
  const Trace t = read_csv(dir / "f" / "fit.csv");
  EXPECT_EQ(t.columns.at(0).first, "I_pl");
  EXPECT_EQ(t.columns.at(1).first, "model");
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = NVSIM_CLI_PATH;
  EXPECT_EQ(std::system((bin + " --version > /dev/null").c_str()), 0);
  const int bad = std::system((bin + " run esr --config /nonexistent.cfg --out " + dir.string() + " 2>/dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(bad));
  EXPECT_EQ(WEXITSTATUS(bad), 1);
}

TEST(Csv, RoundTripAndLocaleIndependent) {
  Trace t;
  t.x_name = "f_mhz";
  t.x = {0.1, 2600.1, 1e-300 + 2600.2};
  t.add_column("I_pl", {0.123456789012345678, -1.0 / 3.0, 5e-17});
  std::setlocale(LC_NUMERIC, "de_DE.UTF-8");  // no-op if unavailable
  const std::string text = format_csv(t);
  std::setlocale(LC_NUMERIC, "C");
  EXPECT_EQ(text.find(';'), std::string::npos);
  EXPECT_EQ(text.substr(0, text.find('\n')), "f_mhz,I_pl");
  const Trace back = parse_csv(text);
  EXPECT_EQ(back.x, t.x);
  EXPECT_EQ(back.column("I_pl"), t.column("I_pl"));
  EXPECT_EQ(format_csv(back), text);
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Csv, RejectsMalformed) {
  EXPECT_THROW(parse_csv("x,y\n1,2,3\n"), CsvError);
  EXPECT_THROW(parse_csv("x,x\n1,2\n"), CsvError);
  EXPECT_THROW(parse_csv("x,y\n1,abc\n"), CsvError);
  EXPECT_THROW(parse_csv("x,y\n2,1\n1,1\n"), CsvError);
  EXPECT_THROW(parse_csv("1,2\n"), CsvError);
}
