// Copyright 2026 The tmpft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tmpft/cli.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using tmpft::cli::Config;
using tmpft::cli::ConfigError;

struct Outcome {
    int status = -1;
    std::string out;
};

// Runs the tool through the shell and captures stdout; stderr is dropped
// unless `merge_stderr` is set.
Outcome run_tool(const std::string& args, bool merge_stderr = false) {
    const std::string cmd =
        std::string(TMPFT_CLI_PATH) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    Outcome o;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return o;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
    const int raw = pclose(pipe);
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return o;
}

class TempDir : public ::testing::Test {
 protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("tmpft_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

std::string config_error_field(const json& doc) {
    try {
        tmpft::cli::parse_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<none>";
}

TEST(ConfigParse, DefaultsAndOverrides) {
    const auto cfg = tmpft::cli::parse_config(json::parse(R"({
        "scenario": "random",
        "parameters": {"seed": 7, "dims": [3, 2, 4], "beta": 0.5, "rank": 2},
        "tolerances": {"ft": 1e-9},
        "grid": {"points": 3, "p_min": 0.2, "p_max": 0.4}
    })"));
    EXPECT_EQ(cfg.scenario, "random");
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.dim_a, 3u);
    EXPECT_EQ(cfg.dim_r, 4u);
    EXPECT_EQ(cfg.rank, 2u);
    EXPECT_EQ(cfg.beta, 0.5);
    EXPECT_EQ(cfg.tol.ft, 1e-9);
    EXPECT_EQ(cfg.tol.bound, 1e-10);
    ASSERT_EQ(cfg.grid.size(), 3u);
    EXPECT_NEAR(cfg.grid[1], 0.3, 1e-15);
}

TEST(ConfigParse, ErrorsNameTheField) {
    EXPECT_EQ(config_error_field(json::parse(R"({"parameters": {"p": "x"}})")), "parameters.p");
    EXPECT_EQ(config_error_field(json::parse(R"({"parameters": {"bogus": 1}})")), "parameters.bogus");
    EXPECT_EQ(config_error_field(json::parse(R"({"unknown": 1})")), "unknown");
    EXPECT_EQ(config_error_field(json::parse(R"({"tolerances": {"ft": -1}})")), "tolerances.ft");
    EXPECT_EQ(config_error_field(json::parse(R"({"parameters": {"dims": [2, 0, 1]}})")), "parameters.dims[1]");
    EXPECT_EQ(config_error_field(json::parse(R"({"system": {"dims": [2, 2]}})")), "system.rho_ab");
    EXPECT_EQ(config_error_field(json::parse(
                  R"({"system": {"dims": [1, 1], "rho_ab": [[1]], "unitary": [[1, 2]], "reservoir": {"energies": [0]}}})")),
              "system.unitary");
    EXPECT_EQ(config_error_field(json::parse(R"({"output": {"report": 3}})")), "output.report");
}

TEST(ConfigParse, ComplexEntries) {
    const auto cfg = tmpft::cli::parse_config(json::parse(R"({
        "system": {"dims": [1, 2], "rho_ab": [[0.5, [0, -0.1]], [[0, 0.1], 0.5]],
                   "unitary": [[0, 1], [1, 0]], "reservoir": {"energies": [0]}}
    })"));
    ASSERT_TRUE(cfg.system.has_value());
    EXPECT_EQ(cfg.system->system.rho_ab(0, 1), tmpft::Complex(0, -0.1));
    EXPECT_EQ(cfg.system->system.reservoir.beta, 1.0);
}

TEST(Serialization, NumbersAndHashAreDeterministic) {
    EXPECT_EQ(tmpft::cli::number_json(0.1).dump(), "0.1");
    EXPECT_EQ(tmpft::cli::number_json(std::numeric_limits<double>::infinity()).dump(), "\"inf\"");
    Config a, b;
    EXPECT_EQ(tmpft::cli::config_hash(a), tmpft::cli::config_hash(b));
    b.p = 0.5;
    EXPECT_NE(tmpft::cli::config_hash(a), tmpft::cli::config_hash(b));
    EXPECT_EQ(tmpft::cli::config_hash(a).rfind("fnv1a64:", 0), 0u);
}

TEST_F(TempDir, AtomicWriteCreatesDirectories) {
    const std::string p = path("nested/dir/report.json");
    tmpft::cli::write_atomic(p, "hello\n");
    EXPECT_EQ(slurp(p), "hello\n");
    EXPECT_FALSE(fs::exists(p + ".tmp"));
}

TEST(Commands, RunWernerInProcess) {
    Config cfg;
    cfg.p = 1.0;
    std::ostringstream out, err;
    EXPECT_EQ(tmpft::cli::run_command(cfg, out, err), tmpft::cli::kOk);
    const auto report = json::parse(out.str());
    EXPECT_NEAR(report["gamma_restricted"].get<double>(), 0.25, 1e-12);
    EXPECT_TRUE(report["passed"].get<bool>());
    EXPECT_EQ(report["tool_version"], tmpft::cli::kToolVersion);
}

TEST(Binary, RunWernerFullyCorrelated) {
    const auto o = run_tool("run --scenario werner --p 1 --beta 1");
    ASSERT_EQ(o.status, 0);
    const auto report = json::parse(o.out);
    EXPECT_NEAR(report["gamma_restricted"].get<double>(), 0.25, 1e-10);
    EXPECT_NEAR(report["integral_ft_lhs"].get<double>(), 0.25, 1e-10);
}

TEST(Binary, RunWernerUncorrelated) {
    const auto o = run_tool("run --scenario werner --p 0");
    ASSERT_EQ(o.status, 0);
    const auto report = json::parse(o.out);
    EXPECT_NEAR(report["information"]["reverse_term"].get<double>(), 0.0, 1e-12);
    EXPECT_NEAR(report["information"]["integral_term"].get<double>(), 0.0, 1e-12);
    EXPECT_NEAR(report["averages"]["delta_I"].get<double>(), 0.0, 1e-12);
}

TEST(Binary, RunRandomSeedSeven) {
    const auto o = run_tool("run --scenario random --seed 7 --dims 2,2,2");
    ASSERT_EQ(o.status, 0);
    const auto report = json::parse(o.out);
    EXPECT_NEAR(report["integral_ft_lhs"].get<double>(), 1.0, 1e-10);
    EXPECT_NEAR(report["gamma_restricted"].get<double>(), 1.0, 1e-10);
}

TEST(Binary, IdenticalConfigGivesIdenticalBytes) {
    const auto a = run_tool("run --scenario random --seed 3 --dims 2,3,2 --emit-tuples");
    const auto b = run_tool("run --scenario random --seed 3 --dims 2,3,2 --emit-tuples");
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(json::parse(a.out)["tuples"].empty());
}

TEST(Binary, VerifyWernerPasses) {
    const auto o = run_tool("verify --scenario werner --p 0.7");
    EXPECT_EQ(o.status, 0) << o.out;
    EXPECT_EQ(o.out.find("FAIL"), std::string::npos);
    EXPECT_NE(o.out.find("PASS detailed_ft"), std::string::npos);
    EXPECT_NE(o.out.find("PASS forward_normalization"), std::string::npos);
}

TEST(Binary, CorruptedReverseFailsAndNamesTuple) {
    const auto o = run_tool("verify --scenario werner --p 0.7 --debug-corrupt-reverse");
    EXPECT_EQ(o.status, 1);
    const auto line_start = o.out.find("FAIL detailed_ft");
    ASSERT_NE(line_start, std::string::npos) << o.out;
    const auto line = o.out.substr(line_start, o.out.find('\n', line_start) - line_start);
    EXPECT_NE(line.find("worst tuple"), std::string::npos) << line;
    EXPECT_NE(run_tool("run --scenario random --seed 2 --debug-corrupt-reverse").status, 0);
}

TEST(Binary, ExplicitSystemFromFile) {
    const auto o = run_tool(std::string("verify --config ") + TMPFT_SOURCE_DIR + "/configs/explicit_2x2x2.json");
    EXPECT_EQ(o.status, 0) << o.out;
    EXPECT_EQ(o.out.find("FAIL"), std::string::npos) << o.out;
}

TEST_F(TempDir, SweepWernerGapNonDecreasing) {
    const std::string table = path("werner.csv");
    const auto o = run_tool("sweep --scenario werner --out " + table);
    ASSERT_EQ(o.status, 0);
    std::istringstream in(slurp(table));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header.rfind("p,gamma_restricted,", 0), 0u);
    // bound_gap is column 13 (0-based).
    std::string row;
    std::size_t rows = 0;
    double previous = -1.0;
    while (std::getline(in, row)) {
        std::vector<std::string> cells;
        std::stringstream rs(row);
        for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
        ASSERT_GE(cells.size(), 19u);
        const double gap = std::stod(cells[13]);
        EXPECT_GE(gap, -1e-12);
        EXPECT_GE(gap, previous - 1e-12);
        EXPECT_EQ(cells[14], rows == 0 || rows == 100 ? "equal" : "greater") << row;
        EXPECT_EQ(cells[18], "true");
        previous = gap;
        ++rows;
    }
    EXPECT_EQ(rows, 101u);
}

TEST(Binary, SweepCounterexampleOrderingLess) {
    const auto o = run_tool("sweep --scenario counterexample");
    ASSERT_EQ(o.status, 0);
    std::istringstream in(o.out);
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        EXPECT_NE(line.find(",less,"), std::string::npos) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 21u);
}

TEST_F(TempDir, SinglePointGridMatchesRun) {
    const std::string cfg = path("one.json");
    std::ofstream(cfg) << R"({"scenario": "werner", "grid": {"p": [0.3]}})";
    const auto sweep = run_tool("sweep --config " + cfg);
    const auto run = run_tool("run --scenario werner --p 0.3");
    ASSERT_EQ(sweep.status, 0);
    ASSERT_EQ(run.status, 0);
    const auto report = json::parse(run.out);
    std::istringstream in(sweep.out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::vector<std::string> cells;
    std::stringstream rs(row);
    for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
    ASSERT_GE(cells.size(), 14u);
    EXPECT_EQ(std::stod(cells[1]), report["gamma_restricted"].get<double>());
    EXPECT_EQ(std::stod(cells[3]), report["integral_ft_lhs"].get<double>());
    EXPECT_EQ(std::stod(cells[10]), report["averages"]["delta_I"].get<double>());
    EXPECT_EQ(std::stod(cells[13]), report["information"]["bound_gap"].get<double>());
}

TEST_F(TempDir, UsageErrorsExitTwo) {
    EXPECT_EQ(run_tool("run --no-such-flag").status, 2);
    EXPECT_EQ(run_tool("").status, 2);
    EXPECT_EQ(run_tool("run --scenario nope").status, 2);
    EXPECT_EQ(run_tool("run --scenario werner --p 1.5").status, 2);
    EXPECT_EQ(run_tool("run --scenario random --dims 2,x,1").status, 2);
    const std::string bad = path("bad.json");
    std::ofstream(bad) << R"({"parameters": {"p": "high"}})";
    const auto o = run_tool("run --config " + bad, true);
    EXPECT_EQ(o.status, 2);
    EXPECT_NE(o.out.find("parameters.p"), std::string::npos) << o.out;
}

TEST_F(TempDir, ReportWrittenToFile) {
    const std::string out = path("r/report.json");
    const auto o = run_tool("run --scenario counterexample --p 0.5 --out " + out);
    ASSERT_EQ(o.status, 0);
    EXPECT_TRUE(o.out.empty());
    const auto report = json::parse(slurp(out));
    EXPECT_EQ(report["scenario"], "counterexample");
    EXPECT_EQ(report["information"]["ordering"], "less");
}

}  // namespace
