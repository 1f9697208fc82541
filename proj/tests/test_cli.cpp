// Copyright 2026 The qdent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the built command-line tool as a subprocess.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = QDENT_CLI_PATH;
const std::string kData = QDENT_DATA_DIR;

struct Result {
  int code = -1;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("qdent_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Result run(const std::string& args) const {
    const std::string err = path("stderr.txt");
    const std::string cmd = kCli + " " + args + " > " + path("stdout.txt") + " 2> " + err;
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
  }

  std::string out() const { return slurp(path("stdout.txt")); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run("").code, 2); }

TEST_F(Cli, UnknownFlagIsUsageError) { EXPECT_EQ(run("simulate " + kData + "/qd1p.json --bogus").code, 2); }

TEST_F(Cli, SimulateWritesReport) {
  const auto r = run("--samples 20000 --out " + path("r.json") + " simulate " + kData + "/qd1p.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(slurp(path("r.json")));
  EXPECT_NEAR(j["fidelity"].get<double>(), 0.884, 0.01);
  EXPECT_EQ(j["n_samples"].get<int>(), 20000);
  EXPECT_EQ(j["seed"].get<int>(), 1);
}

TEST_F(Cli, SameSeedSameBytes) {
  ASSERT_EQ(run("--samples 3000 --seed 5 --out " + path("a.json") + " simulate " + kData + "/qd1p.json").code, 0);
  ASSERT_EQ(run("--samples 3000 --seed 5 --out " + path("b.json") + " simulate " + kData + "/qd1p.json").code, 0);
  ASSERT_EQ(run("--samples 3000 --seed 6 --out " + path("c.json") + " simulate " + kData + "/qd1p.json").code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_NE(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(Cli, MalformedSpecExitsTwoWithoutOutput) {
  write("bad.json", "{\"params\": {\"fss_ueV\": 0.4,");
  const auto r = run("--out " + path("r.json") + " simulate " + path("bad.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(path("r.json")));
}

TEST_F(Cli, UnknownKeyNamedInError) {
  write("bad.json", R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 430, "k": 1, "T1": 5}})");
  const auto r = run("simulate " + path("bad.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("params.T1"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingSigmaIsConfigError) {
  write("bad.json", R"({"params": {"fss_ueV": 0.4, "t1_ps": 430, "k": 1}})");
  EXPECT_EQ(run("simulate " + path("bad.json")).code, 2);
}

TEST_F(Cli, QuadratureFlag) {
  EXPECT_EQ(run("--quadrature gauss_hermite:16 simulate " + kData + "/qd1p.json").code, 0);
  EXPECT_EQ(json::parse(out())["gh_order"].get<int>(), 16);
  EXPECT_EQ(run("--quadrature gauss_hermite:2 simulate " + kData + "/qd1p.json").code, 2);
  EXPECT_EQ(run("--quadrature simpson simulate " + kData + "/qd1p.json").code, 2);
}

TEST_F(Cli, SweepCsvWithSidecar) {
  const auto r = run("--samples 500 --out " + path("s.csv") + " sweep " + kData + "/qd1p.json --n-points 4");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(path("s.csv"));
  EXPECT_EQ(csv.rfind("S_ueV,f_sigma0,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  const auto meta = json::parse(slurp(path("s.csv.meta.json")));
  EXPECT_EQ(meta["command"], "sweep");
  EXPECT_EQ(meta["config"]["n_samples"].get<int>(), 500);
  EXPECT_EQ(run("sweep " + kData + "/qd1p.json --n-points 1").code, 2);
}

TEST_F(Cli, WindowSweepToStdout) {
  const auto r = run("--samples 500 window-sweep " + kData + "/qd1p.json --windows 100,350");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(out().rfind("window_ps,concurrence,fidelity,purity\n100,", 0), 0u);
  EXPECT_NE(r.err.find("window-sweep"), std::string::npos);
  EXPECT_EQ(run("window-sweep " + kData + "/qd1p.json --windows 350,100").code, 2);
  EXPECT_EQ(run("window-sweep " + kData + "/qd1p.json --windows 1,x").code, 2);
}

TEST_F(Cli, CompareEmptyLiterature) {
  write("empty.json", "");
  const auto r = run("compare " + path("empty.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = out();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST_F(Cli, CompareShippedLiterature) {
  const auto r = run("--samples 2000 compare " + kData + "/literature.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = out();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_NE(csv.find("QD1p 256 ps window,concurrence"), std::string::npos);
}

TEST_F(Cli, TomographyExportImport) {
  auto r = run("--samples 2000 tomography " + kData + "/qd1p.json --mode six_basis --poisson --n-per-setting 5000"
               " --export-counts " + path("c.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto a = json::parse(out());
  r = run("--samples 2000 tomography " + kData + "/qd1p.json --mode six_basis --import-counts " + path("c.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto b = json::parse(out());
  EXPECT_EQ(b["counts_source"], "imported");
  EXPECT_EQ(a["fidelity_estimate"], b["fidelity_estimate"]);
}

TEST_F(Cli, TomographyFromDensityMatrix) {
  write("rho.json", R"({"basis_order": "HHHVVHVV", "data": [[[0.5,0],[0,0],[0,0],[0.5,0]], [[0,0],[0,0],[0,0],[0,0]],
                        [[0,0],[0,0],[0,0],[0,0]], [[0.5,0],[0,0],[0,0],[0.5,0]]]})");
  const auto r = run("tomography " + path("rho.json") + " --n-per-setting 100000");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(out());
  EXPECT_LT(j["trace_distance"].get<double>(), 1e-3);
  EXPECT_EQ(run("tomography " + path("rho.json") + " --mode nine").code, 2);
}

TEST_F(Cli, TomographyImportErrors) {
  write("c.csv", "label,counts,weight\nHH+VV,0,1\nHV+VH,0,1\nDD+AA,0,1\nDA+AD,0,1\nRR+LL,0,1\nRL+LR,0,1\n");
  EXPECT_EQ(run("tomography " + kData + "/qd1p.json --mode six_basis --import-counts " + path("c.csv")).code, 2);
  EXPECT_EQ(run("tomography " + kData + "/qd1p.json --import-counts " + path("c.csv")).code, 2);
  write("bad.csv", "label,counts\nHH,1\n");
  EXPECT_EQ(run("tomography " + kData + "/qd1p.json --import-counts " + path("bad.csv")).code, 2);
}

}  // namespace
