#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "codeevo/ingest.hpp"

using namespace codeevo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("codeevo_ingest_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string line(const std::string& id, const std::string& run, int index, const std::string& parents = "[]",
                 const std::string& extra = "") {
    return R"({"id":")" + id + R"(","name":"n)" + id + R"(","run_id":")" + run +
           R"(","method":"EoH","llm":"m","benchmark":"tsp","evaluation_index":)" + std::to_string(index) +
           R"(,"parent_ids":)" + parents + R"(,"fitness_raw":0.5,"code":"x = 1")" + extra + "}\n";
}

}  // namespace

TEST(Ingest, LoadsInFileOrder) {
    const Dataset d = parse_jsonl(line("a", "r", 0) + "\n" + line("b", "r", 1, R"(["a"])") + line("c", "r", 2));
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.samples()[0].id, "a");
    EXPECT_EQ(d.samples()[1].id, "b");
    EXPECT_EQ(d.samples()[2].id, "c");
    EXPECT_EQ(d.samples()[1].parent_ids, std::vector<std::string>{"a"});
    EXPECT_EQ(d.samples()[0].fitness_raw, 0.5);
    EXPECT_EQ(d.samples()[0].group_key().label(), "tsp/EoH/m");
}

TEST(Ingest, CodePathIsResolvedAgainstLogDirectory) {
    const fs::path dir = temp_dir("codepath");
    fs::create_directories(dir / "src");
    std::ofstream(dir / "src" / "algo.py") << "def f():\n    return 1\n";
    std::ofstream(dir / "run.jsonl") << R"({"id":"a","run_id":"r","evaluation_index":0,"code_path":"src/algo.py"})"
                                     << "\n";
    const Dataset d = load_jsonl(dir / "run.jsonl");
    EXPECT_EQ(d.samples()[0].code, "def f():\n    return 1\n");
}

TEST(Ingest, MissingIdNamesLine) {
    try {
        parse_jsonl(line("a", "r", 0) + R"({"run_id":"r","evaluation_index":1,"code":""})" + "\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(Ingest, MalformedInputs) {
    EXPECT_THROW(parse_jsonl("{not json}\n"), ValidationError);
    EXPECT_THROW(parse_jsonl(R"({"id":"a","run_id":"r","evaluation_index":-1,"code":""})"), ValidationError);
    EXPECT_THROW(parse_jsonl(R"({"id":"a","run_id":"r","evaluation_index":0})"), ValidationError);
    EXPECT_THROW(parse_jsonl(line("a", "r", 0) + line("a", "r", 1)), ValidationError);
    EXPECT_THROW(load_jsonl("/nonexistent/run.jsonl"), IoError);
}

TEST(Ingest, MissingAndNonFiniteFitness) {
    const Dataset d = parse_jsonl(R"({"id":"a","run_id":"r","evaluation_index":0,"code":"","fitness_raw":null})"
                                  "\n"
                                  R"({"id":"b","run_id":"r","evaluation_index":1,"code":""})"
                                  "\n"
                                  R"({"id":"c","run_id":"r","evaluation_index":2,"code":"","fitness":2.5})");
    EXPECT_FALSE(d.samples()[0].fitness_raw.has_value());
    EXPECT_FALSE(d.samples()[1].fitness_raw.has_value());
    EXPECT_EQ(d.samples()[2].fitness_raw, 2.5);
}

TEST(Ingest, GroupsAndRunsPartitionSamples) {
    const std::string text = line("a", "r1", 0) + line("b", "r2", 0) + line("c", "r1", 1) +
                             R"({"id":"d","run_id":"r1","method":"LLaMEA","evaluation_index":0,"code":""})" + "\n";
    const Dataset d = parse_jsonl(text);
    ASSERT_EQ(d.groups().size(), 2u);
    EXPECT_EQ(d.groups()[0].second, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(d.groups()[1].second, (std::vector<std::size_t>{3}));
    ASSERT_EQ(d.runs().size(), 3u);
    EXPECT_EQ(d.runs()[0].second, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(d.runs()[2].first.run_id, "r1");
    std::size_t covered = 0;
    for (const auto& [key, members] : d.runs()) covered += members.size();
    EXPECT_EQ(covered, d.size());
    EXPECT_EQ(d.find("c"), 2u);
    EXPECT_FALSE(d.find("zz").has_value());
}

TEST(Ingest, RoundTrip) {
    const fs::path dir = temp_dir("roundtrip");
    const std::string text = line("a", "r", 0) + line("b", "r", 3, R"(["a"])") +
                             R"({"id":"c","run_id":"r","evaluation_index":4,"code":"s = \"é\\n\"\n","fitness_raw":null})" +
                             "\n";
    const Dataset d = parse_jsonl(text);
    write_jsonl(d, dir / "out.jsonl");
    const Dataset back = load_jsonl(dir / "out.jsonl");
    EXPECT_EQ(d, back);
    EXPECT_EQ(to_jsonl(d), to_jsonl(back));
}

TEST(Validate, CleanDatasetUnchanged) {
    const Dataset d = parse_jsonl(line("a", "r", 0) + line("b", "r", 1, R"(["a"])"));
    for (auto policy : {ValidationPolicy::Strict, ValidationPolicy::DropDanglingEdges}) {
        auto [out, violations] = validate(d, policy);
        EXPECT_EQ(out, d);
        EXPECT_TRUE(violations.empty());
    }
}

TEST(Validate, LaterParentDroppedOrRejected) {
    const Dataset d = parse_jsonl(line("p", "r", 5) + line("c", "r", 2, R"(["p"])"));
    auto [out, violations] = validate(d, ValidationPolicy::DropDanglingEdges);
    ASSERT_EQ(violations.size(), 1u);
    EXPECT_EQ(violations[0].sample_id, "c");
    EXPECT_EQ(violations[0].parent_id, "p");
    EXPECT_TRUE(out.samples()[1].parent_ids.empty());
    try {
        validate(d, ValidationPolicy::Strict);
        FAIL();
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("'c'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'p'"), std::string::npos) << msg;
    }
}

TEST(Validate, DanglingAndCrossRunParents) {
    const Dataset d = parse_jsonl(line("a", "r1", 0) + line("b", "r2", 1, R"(["a", "ghost"])"));
    auto [out, violations] = validate(d, ValidationPolicy::DropDanglingEdges);
    EXPECT_EQ(violations.size(), 2u);
    EXPECT_TRUE(out.samples()[1].parent_ids.empty());
    EXPECT_THROW(validate(d, ValidationPolicy::Strict), ValidationError);
}

TEST(Validate, Idempotent) {
    const Dataset d = parse_jsonl(line("a", "r", 0) + line("b", "r", 1, R"(["a", "x", "a"])") +
                                  line("c", "r", 1, R"(["b"])"));
    auto [once, v1] = validate(d, ValidationPolicy::DropDanglingEdges);
    EXPECT_FALSE(v1.empty());
    auto [twice, v2] = validate(once, ValidationPolicy::DropDanglingEdges);
    EXPECT_TRUE(v2.empty());
    EXPECT_EQ(once, twice);
}
