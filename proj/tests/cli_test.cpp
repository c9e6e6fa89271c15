// Copyright 2026 The bfnlab Authors
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "bfnlab/io.hpp"

namespace bfnlab {
namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("bfnlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    RunResult run(const std::string &args) const {
        const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
        std::string cmd = std::string(BFNLAB_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
        int status = std::system(cmd.c_str());
        RunResult r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = read_file(out);
        r.err = read_file(err);
        fs::remove(out);
        fs::remove(err);
        return r;
    }

    std::string data(const std::string &name) const { return std::string(BFNLAB_DATA_DIR) + "/" + name; }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST_F(Cli, HelpExitsZero) {
    RunResult r = run("--help");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("approximate"), std::string::npos);
}

TEST_F(Cli, StarBranchingFactor) {
    RunResult r = run("bf --hypergraph " + data("star.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "7\n");
    r = run("bf --json --hypergraph " + data("star.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_DOUBLE_EQ(parse_json(r.out)["bf"].get<double>(), 7.0);
}

TEST_F(Cli, CorpusIsReproducible) {
    fs::create_directories(path("a"));
    fs::create_directories(path("b"));
    const std::string common = " --kind planted-sparse-junta --count 3 --seed 17 --n 10 --p 0.1 --degree 1";
    ASSERT_EQ(run("gen-corpus --out-dir " + path("a") + common).code, 0);
    ASSERT_EQ(run("gen-corpus --out-dir " + path("b") + common).code, 0);
    std::size_t files = 0;
    for (const auto &entry : fs::directory_iterator(path("a"))) {
        const fs::path other = fs::path(path("b")) / entry.path().filename();
        EXPECT_EQ(read_file(entry.path()), read_file(other)) << entry.path();
        ++files;
    }
    EXPECT_EQ(files, 7u);
    Json manifest = read_json(path("a") + "/manifest.json");
    EXPECT_EQ(manifest["config"]["seed"], 17);
    EXPECT_EQ(manifest["items"].size(), 3u);
}

TEST_F(Cli, ApproximateRecoversPlantedJunta) {
    fs::create_directories(path("c"));
    ASSERT_EQ(run("gen-corpus --out-dir " + path("c") +
                  " --kind planted-sparse-junta --count 1 --seed 3 --n 10 --p 0.1 --degree 1 --noise-lo 0.001 --noise-hi 0.002")
                  .code,
              0);
    const std::string in = path("c") + "/instance_000.json";
    const std::string truth = path("c") + "/instance_000.truth.json";
    RunResult r = run("approximate --input " + in + " --truth " + truth + " --p 0.1 --degree 1 --seed 1 --out " +
                      path("g.json") + " --report " + path("report.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    Json report = read_json(path("report.json"));
    EXPECT_TRUE(report["recovery"].get<bool>());
    EXPECT_EQ(report["config"]["seed"], 1);
    EXPECT_GE(report["config"]["samples"].get<int>(), 2000);

    // the candidate feeds straight into verify
    r = run("verify --f " + in + " --g " + path("g.json") + " --p 0.1");
    ASSERT_EQ(r.code, 0) << r.err;
    Json v = parse_json(r.out);
    EXPECT_TRUE(v["quantized"].get<bool>());
    EXPECT_LT(v["err2"].get<double>(), 0.01);
}

TEST_F(Cli, ApproximateNeedsSeed) {
    RunResult r = run("approximate --input " + data("and2.json") + " --p 0.1");
    EXPECT_EQ(r.code, 2);
    r = run("approximate --exact --input " + data("and2.json") + " --p 0.1 --degree 2 --values 0,1");
    EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, MalformedInputWritesNothing) {
    {
        std::ofstream bad(path("bad.json"));
        bad << "{\"n\": 2, \"repr\": \"truth_table\", \"values\": [0, 1";
    }
    RunResult r = run("approximate --input " + path("bad.json") + " --seed 1 --out " + path("g.json") + " --report " +
                      path("r.json"));
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(fs::exists(path("g.json")));
    EXPECT_FALSE(fs::exists(path("r.json")));
    EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, CapExceededIsReported) {
    Json edge = Json::array();
    for (int i = 0; i < 30; ++i) {
        edge.push_back(i);
    }
    {
        std::ofstream h(path("big.json"));
        h << Json{{"n", 40}, {"edges", Json::array({edge})}}.dump();
    }
    RunResult r = run("bf --hypergraph " + path("big.json"));
    EXPECT_EQ(r.code, 3);
    Json err = parse_json(r.err.substr(0, r.err.find('\n')));
    EXPECT_EQ(err["error"], "cap_exceeded");
}

TEST_F(Cli, OracleMethods) {
    for (const std::string method : {"oracle", "fkn", "ks"}) {
        RunResult r = run("oracle --method " + method + " --input " + data("and2.json") + " --degree 1");
        ASSERT_EQ(r.code, 0) << method << ": " << r.err;
        Json j = parse_json(r.out);
        EXPECT_GE(j["err"].get<double>(), 0.0);
        EXPECT_EQ(j["config"]["method"], method);
    }
    EXPECT_EQ(run("oracle --method fkn --p 0.25 --input " + data("and2.json")).code, 2);
}

TEST_F(Cli, FdExperimentCsv) {
    RunResult r = run("experiment fd --d 2 --n 12 --csv " + path("fd.csv") + " --json " + path("fd.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    std::string csv = read_file(path("fd.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "delta,p,pr_not_binary,binomial_reference");
    EXPECT_EQ(read_json(path("fd.json"))["expected_slope"], 4);
}

}  // namespace
}  // namespace bfnlab
