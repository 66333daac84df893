// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "foresight/error.hpp"
#include "foresight/metrics.hpp"
#include "test_support.hpp"

namespace foresight::cli {
namespace {

using testing::fixture;
using testing::read_text;
using testing::TempDir;

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation cli(std::vector<std::string> args) {
    args.insert(args.begin(), "foresight");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string mock() { return "mock:" + fixture("mock.rules").string(); }

void check_golden(const std::string& text, const std::string& name) {
    const auto path = fixture("golden/" + name);
    if (testing::update_goldens()) testing::write_text(path, text);
    EXPECT_EQ(text, read_text(path)) << name;
}

Invocation run(const TempDir& dir, const std::string& strategy, const std::string& name,
               std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"run",       "--strategy", strategy, "--events",  fixture("val.jsonl").string(),
                                  "--date",    "2022-08-01", "--backend", mock(), "--out",
                                  (dir / name).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return cli(args);
}

void write_probs(const std::filesystem::path& p, const std::string& strategy, const std::vector<double>& probs) {
    std::vector<ForecastRecord> f;
    for (std::size_t i = 0; i < probs.size(); ++i)
        f.push_back({"e" + std::to_string(i), strategy, Date::from_iso("2022-08-01"), probs[i], {}, std::nullopt});
    std::ofstream out(p);
    write_forecasts(out, f);
}

TEST(Run, BasicMatchesGolden) {
    TempDir dir;
    const auto r = run(dir, "basic", "out.jsonl");
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto text = read_text(dir / "out.jsonl");
    check_golden(text, "cli/basic_forecasts.jsonl");
    const auto f = load_forecasts((dir / "out.jsonl").string());
    ASSERT_EQ(f.size(), 10u);
    for (const auto& rec : f) {
        ASSERT_TRUE(rec.trace_ref);
        EXPECT_TRUE(std::filesystem::exists(dir / "traces" / *rec.trace_ref));
        EXPECT_NEAR(rec.probability, 0.2, 1e-12);
    }
}

TEST(Run, UnknownStrategyIsUsageError) {
    TempDir dir;
    const auto r = run(dir, "telepathy", "out.jsonl");
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("telepathy"), std::string::npos);
}

TEST(Run, StrategyOnlyFlagsAreChecked) {
    TempDir dir;
    EXPECT_EQ(run(dir, "basic", "a.jsonl", {"--persona-count", "3"}).code, kExitConfig);
    EXPECT_EQ(run(dir, "basic", "b.jsonl", {"--keyword-count", "3"}).code, kExitConfig);
    EXPECT_EQ(run(dir, "basic", "c.jsonl", {"--replay-only"}).code, kExitConfig);
    EXPECT_EQ(cli({"run", "--events", fixture("val.jsonl").string(), "--date", "08/01/2022", "--out",
                   (dir / "d.jsonl").string()})
                  .code,
              kExitConfig);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitConfig);
}

TEST(Run, EmptyActiveSet) {
    TempDir dir;
    const auto r = cli({"run", "--events", fixture("val.jsonl").string(), "--date", "2021-01-01", "--backend", mock(),
                        "--out", (dir / "out.jsonl").string()});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_TRUE(std::filesystem::exists(dir / "out.jsonl"));
    EXPECT_EQ(read_text(dir / "out.jsonl"), "");
    EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Run, PartialFailuresExitOne) {
    TempDir dir;
    testing::write_text(dir / "rules.json",
                        R"({"rules":[{"match":"contains","pattern":"COVID","error":"down"},)"
                        R"({"match":"regex","pattern":"<<<\\n([\\s\\S]*)\\n>>>$","response":"{{1}}"},)"
                        R"({"match":"any","response":"10%"}]})");
    const auto r = cli({"run", "--events", fixture("val.jsonl").string(), "--date", "2022-08-01", "--backend",
                        "mock:" + (dir / "rules.json").string(), "--out", (dir / "out.jsonl").string()});
    EXPECT_EQ(r.code, kExitPartial);
    const auto f = load_forecasts((dir / "out.jsonl").string());
    EXPECT_LT(f.size(), 10u);
    EXPECT_GT(f.size(), 0u);
}

TEST(Run, ConfigFileSuppliesFlags) {
    TempDir dir;
    testing::write_text(dir / "run.toml", "[run]\nstrategy = \"forecaster\"\nsamples = 2\nbackend = \"" + mock() +
                                              "\"\n");
    const auto r = cli({"--config", (dir / "run.toml").string(), "run", "--events", fixture("val.jsonl").string(),
                        "--date", "2022-08-01", "--out", (dir / "out.jsonl").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto f = load_forecasts((dir / "out.jsonl").string());
    ASSERT_FALSE(f.empty());
    EXPECT_EQ(f[0].strategy, "forecaster");
    EXPECT_EQ(f[0].samples.size(), 2u);
}

TEST(Score, GoldenReport) {
    TempDir dir;
    const auto r = cli({"score", "--events", fixture("val.jsonl").string(), "--forecasts",
                        fixture("val_forecasts.jsonl").string(), "--from-market", "2022-08-01", "--report",
                        (dir / "report.json").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    check_golden(r.out, "cli/score.md");
    const auto report = nlohmann::json::parse(read_text(dir / "report.json"));
    EXPECT_FALSE(report.empty());
}

TEST(Score, UnknownEventNamed) {
    TempDir dir;
    write_probs(dir / "f.jsonl", "s", {0.5});
    const auto r = cli({"score", "--events", fixture("val.jsonl").string(), "--forecasts", (dir / "f.jsonl").string()});
    EXPECT_EQ(r.code, kExitPartial);
    EXPECT_NE(r.err.find("e0"), std::string::npos);
}

TEST(Bias, PublishedCoherence) {
    const auto report = compute_bias({fixture("bias_forward.jsonl"), fixture("bias_reversed.jsonl"), std::nullopt});
    EXPECT_NEAR(report.mean_forward, 0.2529, 1e-12);
    EXPECT_NEAR(report.coherence, 0.8564, 1e-4);
    const auto r = cli({"bias", "--forward", fixture("bias_forward.jsonl").string(), "--reversed",
                        fixture("bias_reversed.jsonl").string(), "--events", fixture("val.jsonl").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("0.8564"), std::string::npos);
    EXPECT_NE(r.out.find("Brier"), std::string::npos);
}

TEST(Bias, CoherentPairSumsToOne) {
    const auto report = compute_bias({fixture("bias_forward.jsonl"), fixture("bias_forward.jsonl"), std::nullopt});
    EXPECT_NEAR(report.coherence, 1.0, 1e-12);
}

TEST(Bias, MismatchedSets) {
    TempDir dir;
    write_probs(dir / "f.jsonl", "basic", {0.1, 0.2});
    write_probs(dir / "r.jsonl", "reversed", {0.1});
    EXPECT_THROW(compute_bias({dir / "f.jsonl", dir / "r.jsonl", std::nullopt}), MismatchedEventSets);
    EXPECT_EQ(cli({"bias", "--forward", (dir / "f.jsonl").string(), "--reversed", (dir / "r.jsonl").string()}).code,
              kExitPartial);
}

TEST(Rationale, EqualInputs) {
    TempDir dir;
    write_probs(dir / "a.jsonl", "basic", {0.1, 0.5});
    const auto r = cli({"rationale", "--just", (dir / "a.jsonl").string(), "--rationale", (dir / "a.jsonl").string()});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("e0\t0.10000000000000001\t0.10000000000000001\t0\n"), std::string::npos);
    EXPECT_NE(r.out.find("# mean_delta\t0.0000"), std::string::npos);
}

TEST(Rationale, UniformShift) {
    TempDir dir;
    write_probs(dir / "a.jsonl", "basic", {0.1, 0.3, 0.5});
    write_probs(dir / "b.jsonl", "basic_with_rationale", {0.3, 0.5, 0.7});
    const auto r = cli({"rationale", "--just", (dir / "a.jsonl").string(), "--rationale", (dir / "b.jsonl").string()});
    EXPECT_NE(r.out.find("# mean_delta\t0.2000"), std::string::npos);
}

TEST(Rationale, ScriptedPairGolden) {
    TempDir dir;
    ASSERT_EQ(run(dir, "basic", "just.jsonl").code, kExitOk);
    ASSERT_EQ(run(dir, "basic_with_rationale", "rat.jsonl").code, kExitOk);
    const auto r =
        cli({"rationale", "--just", (dir / "just.jsonl").string(), "--rationale", (dir / "rat.jsonl").string()});
    ASSERT_EQ(r.code, kExitOk);
    check_golden(r.out, "cli/rationale.tsv");
    EXPECT_NE(r.out.find("# mean_delta\t0.1500"), std::string::npos);
}

}  // namespace
}  // namespace foresight::cli
