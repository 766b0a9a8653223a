// CLI outputs against checked-in golden files. Numbers are compared with a
// relative tolerance so a different compiler or libm does not trip the check;
// everything else must match exactly. Run with ENTAMP_UPDATE_GOLDEN=1 to
// rewrite the files after an intended change.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::string(" \t\r\n,:{}[]\"").find(ch) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool as_number(const std::string& s, double& x) {
  char* end = nullptr;
  x = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !s.empty();
}

void expect_matches_golden(const std::string& name, const std::string& actual) {
  const fs::path golden = fs::path(ENTAMP_GOLDEN_DIR) / name;
  if (std::getenv("ENTAMP_UPDATE_GOLDEN")) {
    std::ofstream(golden, std::ios::binary) << actual;
    GTEST_SKIP() << "rewrote " << golden;
  }
  ASSERT_TRUE(fs::exists(golden)) << golden;
  const auto want = tokens(slurp(golden));
  const auto got = tokens(actual);
  ASSERT_EQ(got.size(), want.size()) << name << ": token count differs";
  for (std::size_t i = 0; i < want.size(); ++i) {
    double a = 0.0, b = 0.0;
    if (as_number(want[i], a) && as_number(got[i], b)) {
      EXPECT_LE(std::abs(a - b), 1e-7 * std::max(std::abs(a), 1e-3))
          << name << " token " << i << ": " << got[i] << " vs golden " << want[i];
    } else {
      EXPECT_EQ(got[i], want[i]) << name << " token " << i;
    }
  }
}

std::string run_cli(const std::string& args, const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("entamp_golden_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cmd = std::string(ENTAMP_CLI) + " " + args + " --out " + dir.string() + "/ > " +
                          (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  EXPECT_TRUE(WIFEXITED(status) && WEXITSTATUS(status) == 0) << cmd << "\n" << slurp(dir / "stderr.txt");
  return dir.string();
}

std::string n100() { return std::string(ENTAMP_CONFIG_DIR) + "/n100.toml"; }
std::string data(const std::string& f) { return std::string(ENTAMP_DATA_DIR) + "/" + f; }

}  // namespace

TEST(Golden, WorkedExampleReport) {
  const auto dir = run_cli("run --config " + n100(), "run");
  expect_matches_golden("run_n100.json", slurp(fs::path(dir) / "report.json"));
}

TEST(Golden, NSweepTable) {
  const auto dir = run_cli("table --table " + data("n_sweep.csv"), "nsweep");
  expect_matches_golden("n_sweep.csv", slurp(fs::path(dir) / "table.csv"));
}

TEST(Golden, EtaSweepTable) {
  const auto dir = run_cli("table --table " + data("eta_sweep.csv"), "etasweep");
  expect_matches_golden("eta_sweep.csv", slurp(fs::path(dir) / "table.csv"));
}

TEST(Golden, NoiseQuartetsShortRun) {
  const auto dir = run_cli("noise-mc --n-list 100,500 --trials 24 --seed 3", "mc");
  expect_matches_golden("noise_mc.csv", slurp(fs::path(dir) / "noise_mc.csv"));
}

TEST(Golden, LeakageTradeoffShortRun) {
  const auto dir =
      run_cli("leakage --config " + n100() + " --mirrors 5,59 --kbar-grid 4,12,30 --trials 16 --seed 2", "leak");
  expect_matches_golden("leakage_5_59.csv", slurp(fs::path(dir) / "leakage.csv"));
}

TEST(Golden, ScalingFits) {
  const auto dir = run_cli("fit-scaling --table " + data("n_sweep.csv"), "fit");
  expect_matches_golden("fit_scaling.json", slurp(fs::path(dir) / "fit_scaling.json"));
}
