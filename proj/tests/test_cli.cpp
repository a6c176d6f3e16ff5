// Copyright 2026 The gnrimpute Authors
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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status = -1;
  std::string output;
};

// Runs gnrctl with stderr folded into the captured output.
Outcome run(const std::string& args) {
  const std::string cmd = std::string(GNRCTL_PATH) + " " + args + " 2>&1";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(GNR_TEST_SCRATCH) / ("cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmall =
    "-s synth.n=100 -s synth.d=3 -s model.hidden_sizes=8 -s model.iterations=30 -s model.batch_size=32 "
    "-s model.K=4 -s model.L=20";

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("train --no-such-flag").status, 2);
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST(Cli, LibraryErrorsExitOneWithDiagnostic) {
  const Outcome r = run("synth -s model.nope=1 -o " + scratch("bad").string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("gnrctl:"), std::string::npos);
  EXPECT_NE(r.output.find("model.nope"), std::string::npos);
}

TEST(Cli, TrainImputeIsDeterministicEndToEnd) {
  const fs::path dir = scratch("flow");
  ASSERT_EQ(run(std::string("synth ") + kSmall + " -o " + dir.string()).status, 0);
  const std::string data = (dir / "observed.csv").string();
  for (const char* tag : {"a", "b"}) {
    const fs::path out = dir / tag;
    const Outcome t = run(std::string("train ") + kSmall + " --data " + data + " -o " + out.string());
    ASSERT_EQ(t.status, 0) << t.output;
    const Outcome i = run("impute --model " + (out / "model.ckpt").string() + " --data " + data + " -o " + out.string());
    ASSERT_EQ(i.status, 0) << i.output;
    EXPECT_TRUE(fs::exists(out / "config.echo"));
  }
  for (const char* f : {"model.ckpt", "completed.csv", "mask_prob.csv", "training_log.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  const Outcome e = run("eval --truth " + (dir / "truth.csv").string() + " --observed " + data + " --completed " +
                        (dir / "a" / "completed.csv").string() + " --prob " + (dir / "a" / "mask_prob.csv").string());
  EXPECT_EQ(e.status, 0) << e.output;
  EXPECT_NE(e.output.find("rmse"), std::string::npos);
}

TEST(Cli, FeatureMismatchIsConsistencyError) {
  const fs::path dir = scratch("mismatch");
  ASSERT_EQ(run(std::string("synth ") + kSmall + " -o " + dir.string()).status, 0);
  ASSERT_EQ(run(std::string("train ") + kSmall + " --data " + (dir / "observed.csv").string() + " -o " + dir.string())
                .status,
            0);
  std::ofstream(dir / "wide.csv") << "a,b,c,d\n1,,3,4\n";
  const Outcome r = run("impute --model " + (dir / "model.ckpt").string() + " --data " + (dir / "wide.csv").string() +
                        " -o " + dir.string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("consistency"), std::string::npos) << r.output;
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const fs::path dir = scratch("env");
  const std::string cmd = "GNR_OUTPUT_DIR=" + dir.string() + " " + GNRCTL_PATH + " synth " + kSmall + " > /dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "truth.csv"));
}

TEST(Cli, BenchRerunFromEchoIsByteIdentical) {
  const fs::path dir = scratch("bench");
  const std::string opts = std::string(kSmall) + " -s bench.seeds=0,1 -s bench.methods=gnr,mean,serial_selection";
  ASSERT_EQ(run("bench " + opts + " -o " + (dir / "a").string()).status, 0);
  const Outcome again = run("bench -c " + (dir / "a" / "config.echo").string() + " -o " + (dir / "b").string());
  ASSERT_EQ(again.status, 0) << again.output;
  for (const char* f : {"report.csv", "cells.csv"}) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

// Labels must match exactly; numbers to 1e-6 relative, which absorbs
// floating-point differences between compilers and instruction sets.
TEST(Cli, SmokeBenchMatchesGolden) {
  const fs::path dir = scratch("golden");
  const Outcome r = run(std::string("bench -c ") + GNR_SOURCE_DIR + "/configs/smoke.conf -o " + dir.string());
  ASSERT_EQ(r.status, 0) << r.output;
  const auto got = read_csv(dir / "report.csv");
  const auto want = read_csv(fs::path(GNR_SOURCE_DIR) / "tests/golden/smoke_report.csv");
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    ASSERT_EQ(got[i].size(), want[i].size()) << "row " << i;
    for (std::size_t j = 0; j < want[i].size(); ++j) {
      char* end = nullptr;
      const double w = std::strtod(want[i][j].c_str(), &end);
      const bool numeric = i > 0 && !want[i][j].empty() && end && *end == '\0';
      if (!numeric) {
        EXPECT_EQ(got[i][j], want[i][j]) << "row " << i << " col " << j;
        continue;
      }
      const double g = std::strtod(got[i][j].c_str(), nullptr);
      EXPECT_NEAR(g, w, 1e-6 * std::max(1.0, std::abs(w))) << "row " << i << " col " << j;
    }
  }
}

}  // namespace
