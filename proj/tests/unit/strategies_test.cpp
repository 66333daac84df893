// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "foresight/error.hpp"
#include "foresight/metrics.hpp"
#include "foresight/strategies.hpp"
#include "test_support.hpp"

namespace foresight {
namespace {

using llm::MockRule;
using llm::ScriptedBackend;
using testing::any;
using testing::contains;
using testing::templates;

const Date kToday = Date::from_iso("2022-08-01");

MockRule regex(std::string pattern, std::vector<std::string> responses) {
    return {MockRule::Match::Regex, std::move(pattern), std::move(responses), std::nullopt};
}

/// Scripted backend whose first rule echoes forecaster output back out of the
/// extraction prompt.
ScriptedBackend scripted(std::vector<MockRule> rules) {
    rules.insert(rules.begin(), testing::extraction_echo());
    return ScriptedBackend(std::move(rules));
}

ChainTrace run_with(ScriptedBackend& b, ChainTrace (*fn)(const StrategyEnv&, const Event&, Date, const ChainOptions&),
                    const Event& e = testing::make_event(), ChainOptions opts = {}) {
    StrategyEnv env{b, templates()};
    return fn(env, e, kToday, opts);
}

std::size_t llm_steps(const ChainTrace& t) {
    return static_cast<std::size_t>(std::count_if(t.steps.begin(), t.steps.end(), [](const auto& s) { return s.is_llm(); }));
}

const StepRecord& step(const ChainTrace& t, const std::string& id) {
    for (const auto& s : t.steps)
        if (s.step_id == id) return s;
    throw std::runtime_error("no step " + id);
}

void expect_self_contained(const ChainTrace& t) {
    for (const auto& s : t.steps)
        if (s.is_llm()) {
            EXPECT_EQ(rerender(templates(), s), s.prompt) << t.strategy << "/" << s.step_id;
        }
}

TEST(StrategyIds, RoundTrip) {
    for (auto id : all_strategies()) EXPECT_EQ(parse_strategy_id(to_string(id)), id);
    EXPECT_EQ(all_strategies().size(), 9u);
    EXPECT_FALSE(parse_strategy_id("expert"));
}

TEST(StrategySpec, ParsesKnownKeys) {
    const auto spec = StrategySpec::parse("crowd", {{"persona_count", "3"}, {"samples", "4"}});
    EXPECT_EQ(spec.options().persona_count, 3);
    EXPECT_EQ(spec.options().final_samples, 4);
    EXPECT_THROW(StrategySpec::parse("nope"), ConfigError);
    EXPECT_THROW(StrategySpec::parse("basic", {{"persona_count", "3"}}), ConfigError);
    EXPECT_THROW(StrategySpec::parse("news", {{"keyword_count", "x"}}), ConfigError);
    EXPECT_THROW(StrategySpec::parse("basic", {{"samples", "0"}}), ConfigError);
}

TEST(Basic, ConstantMock) {
    auto b = testing::constant_backend("10%");
    const auto t = run_with(*b, run_basic);
    EXPECT_NEAR(t.final_probability, 0.10, 1e-15);
    EXPECT_EQ(llm_steps(t), 1u);
    EXPECT_EQ(t.steps[0].n_samples, 8);
    EXPECT_EQ(t.steps[0].temperature, 0.01);
    expect_self_contained(t);
}

TEST(Basic, AlternatingSamples) {
    auto b = scripted({any({"0%", "20%"})});
    const auto t = run_with(b, run_basic);
    EXPECT_NEAR(t.final_probability, 0.10, 1e-15);
    EXPECT_EQ(t.final_samples.size(), 8u);
}

TEST(Basic, ExpiredEventRejected) {
    auto b = testing::constant_backend("10%");
    const auto e = testing::make_event("e", "c", Date::from_iso("2022-01-01"), kToday);
    StrategyEnv env{*b, templates()};
    EXPECT_THROW(run_basic(env, e, kToday), PreconditionError);
    EXPECT_EQ(b->calls(), 0u);
}

TEST(Basic, DropsUnreadableSamplesWithWarning) {
    auto b = scripted({any({"no idea", "30%"})});
    const auto t = run_with(b, run_basic);
    EXPECT_NEAR(t.final_probability, 0.30, 1e-15);
    EXPECT_EQ(t.final_samples.size(), 4u);
    EXPECT_FALSE(t.steps[0].warnings.empty());
    EXPECT_EQ(t.steps[0].extractions.size(), 8u);
}

TEST(Basic, NoReadableSampleFails) {
    auto b = scripted({any({"no idea"})});
    try {
        run_with(b, run_basic);
        FAIL();
    } catch (const ChainError& e) {
        EXPECT_EQ(std::string(e.kind()), "ExtractionFailed");
        EXPECT_EQ(e.partial_trace().steps.size(), 1u);
    }
}

TEST(Forecaster, PreamblePrepended) {
    auto b = testing::constant_backend("10%");
    const auto t = run_with(*b, run_forecaster);
    EXPECT_EQ(t.steps[0].prompt.rfind("In this chat, you are a superforecaster", 0), 0u);
    EXPECT_NEAR(t.final_probability, 0.10, 1e-15);
    expect_self_contained(t);
}

TEST(BaseRate, ThreeStepChain) {
    auto b = scripted({contains("Pose a question", {"How often do things like this happen?"}),
                       contains("How often do things like this happen?", {"About one in ten such things happen."}),
                       any({"10%"})});
    const auto t = run_with(b, run_base_rate);
    ASSERT_EQ(t.steps.size(), 3u);
    EXPECT_NEAR(t.final_probability, 0.10, 1e-15);
    EXPECT_NE(t.steps[2].prompt.find("About one in ten such things happen."), std::string::npos);
    EXPECT_EQ(std::get<std::string>(t.steps[0].parsed), "How often do things like this happen?");
    expect_self_contained(t);
}

TEST(BaseRate, EmptyQuestionPassesThrough) {
    auto b = scripted({contains("Pose a question", {""}), any({"10%"})});
    const auto t = run_with(b, run_base_rate);
    EXPECT_EQ(t.steps.size(), 3u);
    EXPECT_EQ(t.steps[0].responses.front(), "");
}

TEST(BaseRate, AnswerFailureAborts) {
    auto b = scripted({contains("Pose a question", {"Q?"}), testing::fails_on("Q?", "down"), any({"10%"})});
    try {
        run_with(b, run_base_rate);
        FAIL();
    } catch (const ChainError& e) {
        EXPECT_EQ(std::string(e.kind()), "BackendUnavailable");
        EXPECT_EQ(e.partial_trace().steps.size(), 1u);
        EXPECT_EQ(e.event_id(), "e1");
    }
}

TEST(BothSides, FinalEmbedsProsAndCons) {
    auto b = scripted({contains("that the event will happen", {"PRO-ARGUMENT"}),
                       contains("that the event will not happen", {"CON-ARGUMENT"}), any({"10%"})});
    const auto t = run_with(b, run_both_sides);
    ASSERT_EQ(t.steps.size(), 3u);
    EXPECT_EQ(t.steps[0].step_id, "pros");
    EXPECT_EQ(t.steps[1].step_id, "cons");
    EXPECT_EQ(t.steps[2].step_id, "predict");
    EXPECT_NE(t.steps[2].prompt.find("PRO-ARGUMENT"), std::string::npos);
    EXPECT_NE(t.steps[2].prompt.find("CON-ARGUMENT"), std::string::npos);
    EXPECT_NEAR(t.final_probability, 0.10, 1e-15);
    expect_self_contained(t);
}

TEST(BothSides, ConstantMock) {
    auto b = testing::constant_backend("10%");
    EXPECT_NEAR(run_with(*b, run_both_sides).final_probability, 0.10, 1e-15);
}

const char* kPositive =
    "[PATH TO POSITIVE OUTCOME]\nA happens\nthen B\n[PATH TO POSITIVE OUTCOME]\nC happens\nEND";
const char* kNegative = "[PATH TO NEGATIVE OUTCOME]\nX stalls\n[PATH TO NEGATIVE OUTCOME]\nY blocks it\nEND";

TEST(Sequences, ListsParsedPaths) {
    auto b = scripted({regex(R"(\[POTENTIAL INCITING EVENTS\]$)", {kPositive}),
                       regex(R"(\[POTENTIAL INHIBITING EVENTS\]$)", {kNegative}),
                       regex(R"(\[EVENT\] [^\n]*$)", {"[OPPOSITE] Kamala Harris is not the Democratic Nominee for 2024\n[END]"}),
                       any({"0.25"})});
    const auto t = run_with(b, run_sequences);
    ASSERT_EQ(t.steps.size(), 4u);
    EXPECT_EQ(std::get<std::vector<std::string>>(t.steps[0].parsed).size(), 2u);
    EXPECT_EQ(std::get<std::string>(t.steps[1].parsed), "Kamala Harris is not the Democratic Nominee for 2024");
    EXPECT_NE(t.steps[2].prompt.find("[EVENT OPPOSITE] Kamala Harris is not the Democratic Nominee for 2024"),
              std::string::npos);
    const auto& final_prompt = t.steps[3].prompt;
    EXPECT_NE(final_prompt.find("Potential Sequence 1 :\nA happens\nthen B"), std::string::npos);
    EXPECT_NE(final_prompt.find("Potential Sequence 2 :\nC happens"), std::string::npos);
    EXPECT_NE(final_prompt.find("Potential Sequence 2:\nY blocks it"), std::string::npos);
    EXPECT_EQ(final_prompt.find("Potential Sequence 3"), std::string::npos);
    EXPECT_NEAR(t.final_probability, 0.25, 1e-15);
    expect_self_contained(t);
}

TEST(Sequences, NoPathsGiveNoneSections) {
    auto b = scripted({regex(R"(\[POTENTIAL IN(CITING|HIBITING) EVENTS\]$)", {""}),
                       regex(R"(\[EVENT\] [^\n]*$)", {"[OPPOSITE] not so\n[END]"}), any({"0.25"})});
    const auto t = run_with(b, run_sequences);
    EXPECT_NE(t.steps[3].prompt.find("None"), std::string::npos);
    EXPECT_EQ(t.steps[3].prompt.find("Potential Sequence 1"), std::string::npos);
    EXPECT_NEAR(t.final_probability, 0.25, 1e-15);
}

TEST(Sequences, UnmarkedReplyIsOneOpaqueSequence) {
    auto b = scripted({regex(R"(\[POTENTIAL INCITING EVENTS\]$)", {"just prose"}),
                       regex(R"(\[POTENTIAL INHIBITING EVENTS\]$)", {kNegative}),
                       regex(R"(\[EVENT\] [^\n]*$)", {"[OPPOSITE] not so\n[END]"}), any({"0.25"})});
    const auto t = run_with(b, run_sequences);
    EXPECT_EQ(std::get<std::vector<std::string>>(t.steps[0].parsed), std::vector<std::string>{"just prose"});
    EXPECT_FALSE(t.steps[0].warnings.empty());
}

TEST(SequenceParsers, Blocks) {
    EXPECT_FALSE(parse_sequence_blocks("nothing", "[PATH TO POSITIVE OUTCOME]"));
    const auto blocks = parse_sequence_blocks(kPositive, "[PATH TO POSITIVE OUTCOME]");
    ASSERT_TRUE(blocks);
    EXPECT_EQ(*blocks, (std::vector<std::string>{"A happens\nthen B", "C happens"}));
    EXPECT_EQ(parse_opposite("[OPPOSITE]  Not this \n[END]"), "Not this");
    EXPECT_EQ(parse_opposite("Not this either\nmore"), "Not this either");
    EXPECT_EQ(parse_opposite("  \n"), "");
    EXPECT_EQ(parse_keywords("*a\n* b\nnoise\n*a\n*c\n*d", 3), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(parse_job(" an economist.\nmore"), "an economist");
}

MockRule jobs(std::vector<std::string> j) { return contains("I choose to talk to", std::move(j)); }

TEST(Crowd, MeanOverPersonas) {
    auto b = scripted({jobs({"an epidemiologist", "an economist"}), contains("You are an epidemiologist", {"0.2"}),
                       contains("You are an economist", {"0.4"})});
    ChainOptions opts;
    opts.persona_count = 2;
    const auto t = run_with(b, run_crowd, testing::make_event(), opts);
    EXPECT_NEAR(t.final_probability, 0.3, 1e-15);
    EXPECT_EQ(t.final_samples.size(), 2u);
    EXPECT_EQ(llm_steps(t), 3u);
    expect_self_contained(t);
}

TEST(Crowd, SinglePersonaIsTwoSteps) {
    auto b = scripted({jobs({"an economist"}), any({"Ever: 0.9. Within the window: 0.4"})});
    ChainOptions opts;
    opts.persona_count = 1;
    const auto t = run_with(b, run_crowd, testing::make_event(), opts);
    EXPECT_EQ(t.steps.size(), 2u);
    EXPECT_NEAR(t.final_probability, 0.4, 1e-15);
}

TEST(Crowd, DropsFailedPersonas) {
    auto b = scripted({jobs({"an epidemiologist", "an economist"}), contains("You are an epidemiologist", {"unsure"}),
                       contains("You are an economist", {"0.4"})});
    ChainOptions opts;
    opts.persona_count = 2;
    const auto t = run_with(b, run_crowd, testing::make_event(), opts);
    EXPECT_NEAR(t.final_probability, 0.4, 1e-15);
    EXPECT_FALSE(step(t, "persona_1").warnings.empty());
}

TEST(Crowd, AllPersonasFail) {
    auto b = scripted({jobs({"an economist"}), any({"unsure"})});
    ChainOptions opts;
    opts.persona_count = 2;
    EXPECT_THROW(run_with(b, run_crowd, testing::make_event(), opts), ChainError);
}

/// In-memory headline source; ignores the date bound like a misbehaving upstream.
class FakeSource final : public news::HeadlineClient {
  public:
    FakeSource(news::Source s, std::vector<news::Headline> h) : source_(s), headlines_(std::move(h)) {}
    news::Source source() const override { return source_; }
    std::vector<news::Headline> query(const news::QueryWindow& q) override {
        last_terms = q.terms;
        if (fail) throw NetworkError("unreachable");
        return headlines_;
    }
    std::vector<std::string> last_terms;
    bool fail = false;

  private:
    news::Source source_;
    std::vector<news::Headline> headlines_;
};

news::Headline headline(news::Source s, const char* date, std::string title) {
    return {s, Date::from_iso(date), std::move(title), std::nullopt};
}

ScriptedBackend news_backend() {
    return scripted({contains("Give 3 terms", {"*Widget\n*Launch\n*Acme\n*Extra"}),
                     contains("remove any which are totally irrelevant", {"Headline 2 -- 2022-07-20: HN keep me"}),
                     contains("pull all information from the headlines", {"2022-07-10: NYT keep me"}),
                     contains("paraphrase", {"Paraphrased: NYT keep me"}), any({"15%"})});
}

TEST(News, FinalPromptHoldsFilteredHeadlines) {
    using news::Source;
    FakeSource hn(Source::HackerNews, {headline(Source::HackerNews, "2022-07-25", "HN drop me"),
                                       headline(Source::HackerNews, "2022-07-20", "HN keep me"),
                                       headline(Source::HackerNews, "2022-07-01", "HN drop me too")});
    FakeSource nyt(Source::NYT, {headline(Source::NYT, "2022-07-15", "NYT drop me"),
                                 headline(Source::NYT, "2022-07-10", "NYT keep me"),
                                 headline(Source::NYT, "2022-07-05", "NYT drop me too")});
    auto b = news_backend();
    StrategyEnv env{b, templates(), nullptr, &hn, &nyt};
    const auto t = run_news(env, testing::make_event(), kToday);
    EXPECT_EQ(hn.last_terms, (std::vector<std::string>{"Widget", "Launch", "Acme"}));
    const auto& final_prompt = t.steps.back().prompt;
    EXPECT_NE(final_prompt.find("HN keep me"), std::string::npos);
    EXPECT_NE(final_prompt.find("Paraphrased: NYT keep me"), std::string::npos);
    EXPECT_EQ(final_prompt.find("drop me"), std::string::npos);
    EXPECT_EQ(std::get<std::vector<std::string>>(step(t, "query_hackernews").parsed).size(), 3u);
    EXPECT_NEAR(t.final_probability, 0.15, 1e-15);
    expect_self_contained(t);
}

TEST(News, EmptySourcesGiveNoneSections) {
    FakeSource hn(news::Source::HackerNews, {});
    FakeSource nyt(news::Source::NYT, {});
    nyt.fail = true;
    auto b = news_backend();
    StrategyEnv env{b, templates(), nullptr, &hn, &nyt};
    const auto t = run_news(env, testing::make_event(), kToday);
    const auto none = templates().get("news/none_section").body;
    const auto& final_prompt = t.steps.back().prompt;
    EXPECT_NE(final_prompt.find(none), std::string::npos);
    EXPECT_FALSE(step(t, "query_nyt").warnings.empty());
    EXPECT_THROW(step(t, "hn_filter"), std::runtime_error);
    EXPECT_NEAR(t.final_probability, 0.15, 1e-15);
}

TEST(News, FutureHeadlineNeverReachesAPrompt) {
    using news::Source;
    FakeSource hn(Source::HackerNews, {headline(Source::HackerNews, "2022-08-02", "FROM THE FUTURE"),
                                       headline(Source::HackerNews, "2022-07-20", "HN keep me")});
    FakeSource nyt(Source::NYT, {headline(Source::NYT, "2023-01-01", "ALSO FUTURE")});
    auto b = news_backend();
    StrategyEnv env{b, templates(), nullptr, &hn, &nyt};
    const auto t = run_news(env, testing::make_event(), kToday);
    for (const auto& s : t.steps) {
        EXPECT_EQ(s.prompt.find("FUTURE"), std::string::npos) << s.step_id;
        if (auto* lines = std::get_if<std::vector<std::string>>(&s.parsed)) {
            for (const auto& l : *lines) EXPECT_EQ(l.find("FUTURE"), std::string::npos);
        }
    }
}

TEST(News, KeywordFailureAborts) {
    auto b = scripted({contains("Give 3 terms", {"no bullets here"}), any({"15%"})});
    StrategyEnv env{b, templates()};
    try {
        run_news(env, testing::make_event(), kToday);
        FAIL();
    } catch (const ChainError& e) {
        EXPECT_EQ(std::string(e.kind()), "StepParseError");
        EXPECT_EQ(e.partial_trace().steps.size(), 1u);
    }
}

MockRule opposite(std::string text) { return regex(R"(\[EVENT\] [^\n]*$)", {"[OPPOSITE] " + text + "\n[END]"}); }

TEST(Reversed, Complement) {
    auto b = scripted({opposite("Candidate A does not become president"), any({"60%"})});
    const auto t = run_with(b, run_reversed);
    ASSERT_TRUE(t.raw_probability);
    EXPECT_NEAR(*t.raw_probability, 0.6, 1e-15);
    EXPECT_EQ(t.final_probability, 1.0 - *t.raw_probability);
    EXPECT_NEAR(t.final_probability, 0.4, 1e-15);
    EXPECT_NE(t.steps[1].prompt.find("Candidate A does not become president"), std::string::npos);
    expect_self_contained(t);
}

TEST(Reversed, ZeroBecomesOne) {
    auto b = scripted({opposite("not so"), any({"0%"})});
    EXPECT_EQ(run_with(b, run_reversed).final_probability, 1.0);
}

TEST(Reversed, EmptyOppositeAborts) {
    auto b = scripted({regex(R"(\[EVENT\] [^\n]*$)", {"[OPPOSITE] \n[END]"}), any({"0%"})});
    EXPECT_THROW(run_with(b, run_reversed), ChainError);
}

TEST(Reversed, CoherenceGapUnderLowMock) {
    // Both directions answered low: forward 0.2 and reworded 0.4, so 1 - reversed = 0.6.
    auto b = scripted({opposite("it does not happen"), contains("it does not happen", {"40%"}), any({"20%"})});
    const auto split = load_dataset(testing::fixture("val.jsonl").string());
    std::vector<double> fwd, rev;
    StrategyEnv env{b, templates()};
    for (const auto& e : split.events) {
        fwd.push_back(run_basic(env, e, kToday).final_probability);
        rev.push_back(run_reversed(env, e, kToday).final_probability);
    }
    const double c = coherence_sum(aggregate_probabilities(fwd), aggregate_probabilities(rev));
    EXPECT_NEAR(c, 0.8, 1e-12);
}

TEST(Rationale, LastProbabilityWins) {
    auto b = scripted({any({"Considering the evidence, and earlier 50%, therefore 30%"})});
    EXPECT_NEAR(run_with(b, run_basic_with_rationale).final_probability, 0.30, 1e-15);
}

TEST(Rationale, ShiftAgainstBasic) {
    auto b = scripted({contains("talk through your rationale", {"therefore 30%"}), any({"10%"})});
    const auto e = testing::make_event();
    const double just = run_with(b, run_basic, e).final_probability;
    const double rat = run_with(b, run_basic_with_rationale, e).final_probability;
    const auto rows = prediction_shift(std::vector<EventProbability>{{e.id, just}},
                                       std::vector<EventProbability>{{e.id, rat}});
    EXPECT_GT(rows[0].delta, 0.0);
}

TEST(Rationale, ConstantMockMatchesBasic) {
    auto b = testing::constant_backend("10%");
    EXPECT_EQ(run_with(*b, run_basic_with_rationale).final_probability, run_with(*b, run_basic).final_probability);
}

TEST(Traces, JsonRoundTripAndPaths) {
    auto b = llm::ScriptedBackend::from_file(testing::fixture("mock.rules").string());
    const auto split = load_dataset(testing::fixture("val.jsonl").string());
    StrategyEnv env{*b, templates()};
    testing::TempDir dir;
    for (auto id : all_strategies()) {
        const auto t = run_strategy(env, StrategySpec{id, {}}, split.events[0], kToday);
        expect_self_contained(t);
        const auto j = trace_to_json(t);
        const auto back = trace_from_json(nlohmann::json::parse(j.dump()));
        EXPECT_EQ(trace_to_json(back).dump(), j.dump()) << to_string(id);
        const auto path = write_trace(dir.path(), t);
        EXPECT_EQ(path, dir / std::string(to_string(id)) / "val-001.json");
        EXPECT_EQ(nlohmann::ordered_json::parse(testing::read_text(path)).dump(), j.dump());
        const auto f = to_forecast(t, "x.json");
        EXPECT_NO_THROW(f.validate());
        EXPECT_EQ(f.strategy, to_string(id));
    }
}

TEST(Traces, UnsafeIdIsSanitized) {
    ChainTrace t;
    t.event_id = "a/b c";
    t.strategy = "basic";
    const auto p = trace_path("/tmp/x", t);
    EXPECT_EQ(p.parent_path(), std::filesystem::path("/tmp/x/basic"));
    EXPECT_EQ(p.filename().string().find('/'), std::string::npos);
    EXPECT_EQ(p.filename().string().find(' '), std::string::npos);
}

TEST(Traces, PartialTraceOnFailure) {
    auto b = scripted({contains("that the event will happen", {"PRO"}), testing::fails_on("will not happen", "down"),
                       any({"10%"})});
    try {
        run_with(b, run_both_sides);
        FAIL();
    } catch (const ChainError& e) {
        ASSERT_EQ(e.partial_trace().steps.size(), 1u);
        EXPECT_EQ(e.partial_trace().steps[0].step_id, "pros");
        EXPECT_NE(std::string(e.what()).find("e1"), std::string::npos);
    }
}

}  // namespace
}  // namespace foresight
