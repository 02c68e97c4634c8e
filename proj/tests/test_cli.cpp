#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "codeevo/cli.hpp"
#include "codeevo/features.hpp"
#include "codeevo/ingest.hpp"

using namespace codeevo;
namespace fs = std::filesystem;

namespace {

const fs::path kRuns = fs::path(CODEEVO_TEST_DATA) / "synthetic_runs.jsonl";

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "codeevo");
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("codeevo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, PipelineWritesAllOutputs) {
    const auto r = run({"pipeline", "--input", kRuns.string(), "--out", (dir_ / "out").string(), "--iterations", "300"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    for (const char* name : {"features.csv", "ceg.json", "ceg_pc1.svg", "tsne.svg", "correlations.csv", "heatmap.svg"}) {
        EXPECT_TRUE(fs::exists(dir_ / "out" / name)) << name;
        EXPECT_NE(r.out.find(name), std::string::npos) << name;
    }
    const std::string csv = slurp(dir_ / "out" / "correlations.csv");
    EXPECT_EQ(csv.rfind("group,", 0), 0u);
    // Unparsable sample is reported but does not fail the run.
    EXPECT_NE(r.err.find("eoh-9"), std::string::npos);
}

TEST_F(CliTest, TokensAxisMatchesTokenTotal) {
    const auto r = run({"ceg", "--input", kRuns.string(), "--out", dir_.string(), "--y-axis", "tokens"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const std::string svg = slurp(dir_ / "ceg_tokens.svg");
    const Dataset d = load_jsonl(kRuns);
    std::map<std::string, double> expected;
    for (const auto& s : d.samples()) {
        try {
            expected[s.id] = extract_features(s.code).at("token_total");
        } catch (const ParseError&) {
        }
    }
    const std::regex node("class=\"node\"[^>]*data-id=\"([^\"]+)\" data-x=\"[0-9]+\" data-y=\"([^\"]+)\"");
    std::size_t seen = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), node); it != std::sregex_iterator(); ++it) {
        EXPECT_EQ(std::stod((*it)[2]), expected.at((*it)[1])) << (*it)[1];
        ++seen;
    }
    EXPECT_EQ(seen, expected.size());
}

TEST_F(CliTest, ExtractOnly) {
    const auto r = run({"extract", "--input", kRuns.string(), "--out", dir_.string(), "--threads", "2"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "features.csv"));
    EXPECT_FALSE(fs::exists(dir_ / "ceg.json"));
}

TEST_F(CliTest, MissingInputIsUsageError) {
    const auto r = run({"pipeline"});
    EXPECT_EQ(r.code, kExitIo);
    EXPECT_NE(r.err.find("--input"), std::string::npos);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
    EXPECT_EQ(run({"pipeline", "--input", kRuns.string(), "--bogus"}).code, kExitIo);
    EXPECT_EQ(run({"ceg", "--input", kRuns.string(), "--normalize", "zscore"}).code, kExitIo);
    EXPECT_EQ(run({}).code, kExitIo);
}

TEST_F(CliTest, HelpSucceeds) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("pipeline"), std::string::npos);
}

TEST_F(CliTest, MissingFileIsIoError) {
    EXPECT_EQ(run({"extract", "--input", (dir_ / "nope.jsonl").string(), "--out", dir_.string()}).code, kExitIo);
}

TEST_F(CliTest, LineageViolationUnderStrictPolicy) {
    const auto input = write("bad.jsonl",
                             R"({"id":"a","run_id":"r","evaluation_index":0,"fitness_raw":1,"code":"x = 1"})"
                             "\n"
                             R"({"id":"b","run_id":"r","evaluation_index":1,"parent_ids":["zz"],"fitness_raw":2,"code":"y = 2"})"
                             "\n");
    const auto strict = run({"ceg", "--input", input.string(), "--out", (dir_ / "o1").string()});
    EXPECT_EQ(strict.code, kExitValidation);
    EXPECT_NE(strict.err.find("zz"), std::string::npos);
    const auto lenient = run({"ceg", "--input", input.string(), "--out", (dir_ / "o2").string(), "--policy",
                              "drop-dangling-edges"});
    EXPECT_EQ(lenient.code, kExitOk) << lenient.err;
}

TEST_F(CliTest, MalformedLineIsValidationError) {
    const auto input = write("bad.jsonl", "{\"id\": 1,\n");
    const auto r = run({"extract", "--input", input.string(), "--out", dir_.string()});
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_NE(r.err.find("line 1"), std::string::npos);
}

TEST_F(CliTest, TsneNeedsFourSamples) {
    const auto input = write("small.jsonl",
                             R"({"id":"a","run_id":"r","evaluation_index":0,"fitness_raw":1,"code":"x = 1"})"
                             "\n");
    EXPECT_NE(run({"tsne", "--input", input.string(), "--out", dir_.string()}).code, kExitOk);
    EXPECT_EQ(run({"pipeline", "--input", input.string(), "--out", dir_.string()}).code, kExitOk);
}

TEST_F(CliTest, DumpAst) {
    const auto file = write("m.py", "x = 1\n");
    const auto r = run({"dump-ast", file.string()});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("\"Module\""), std::string::npos);
    EXPECT_NE(r.out.find("\"Assign\""), std::string::npos);
    const auto bad = write("b.py", "def (:\n");
    EXPECT_EQ(run({"dump-ast", bad.string()}).code, kExitValidation);
}
