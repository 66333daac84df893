// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/strategies.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <sstream>

namespace foresight {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<StrategyId, std::string_view>, 9> kStrategyNames{{
    {StrategyId::Basic, "basic"},
    {StrategyId::Forecaster, "forecaster"},
    {StrategyId::BaseRate, "base_rate"},
    {StrategyId::BothSides, "both_sides"},
    {StrategyId::Sequences, "sequences"},
    {StrategyId::Crowd, "crowd"},
    {StrategyId::News, "news"},
    {StrategyId::Reversed, "reversed"},
    {StrategyId::BasicWithRationale, "basic_with_rationale"},
}};

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

std::string_view to_string(StrategyId id) noexcept {
    for (const auto& [k, name] : kStrategyNames)
        if (k == id) return name;
    return "unknown";
}

std::optional<StrategyId> parse_strategy_id(std::string_view text) {
    for (const auto& [k, name] : kStrategyNames)
        if (name == text) return k;
    return std::nullopt;
}

const std::vector<StrategyId>& all_strategies() {
    static const std::vector<StrategyId> ids = [] {
        std::vector<StrategyId> v;
        for (const auto& [k, name] : kStrategyNames) v.push_back(k);
        return v;
    }();
    return ids;
}

ChainError::ChainError(std::string event_id, ChainTrace partial, const Error& cause)
    : Error(cause.kind(), event_id + ": " + cause.what()), event_id_(std::move(event_id)), partial_(std::move(partial)) {}

ChainError::ChainError(std::string event_id, ChainTrace partial, std::string kind, const std::string& message)
    : Error(std::move(kind), event_id + ": " + message), event_id_(std::move(event_id)), partial_(std::move(partial)) {}

// ---- spec -------------------------------------------------------------------

namespace {

int parse_positive_int(const std::string& key, const std::string& value) {
    int out = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end || out < 1)
        throw ConfigError("parameter " + key + " must be a positive integer, got '" + value + "'");
    return out;
}

double parse_non_negative(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size() && v >= 0.0) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("parameter " + key + " must be a non-negative number, got '" + value + "'");
}

}  // namespace

StrategySpec StrategySpec::parse(std::string_view id, const std::map<std::string, std::string>& parameters) {
    auto sid = parse_strategy_id(id);
    if (!sid) throw ConfigError("unknown strategy '" + std::string(id) + "'");
    StrategySpec spec{*sid, parameters};
    for (const auto& [key, value] : parameters) {
        const bool known = key == "samples" || key == "temperature" ||
                           (key == "persona_count" && *sid == StrategyId::Crowd) ||
                           ((key == "keyword_count" || key == "max_results") && *sid == StrategyId::News);
        if (!known) throw ConfigError("unknown parameter '" + key + "' for strategy " + std::string(id));
    }
    (void)spec.options();  // validates values
    return spec;
}

ChainOptions StrategySpec::options() const {
    ChainOptions o;
    for (const auto& [key, value] : parameters) {
        if (key == "samples") o.final_samples = parse_positive_int(key, value);
        else if (key == "temperature") o.temperature = parse_non_negative(key, value);
        else if (key == "persona_count") o.persona_count = parse_positive_int(key, value);
        else if (key == "keyword_count") o.keyword_count = parse_positive_int(key, value);
        else if (key == "max_results") o.max_results = parse_positive_int(key, value);
    }
    return o;
}

// ---- parsers ----------------------------------------------------------------

std::optional<std::vector<std::string>> parse_sequence_blocks(std::string_view text, std::string_view marker) {
    if (text.find(marker) == std::string_view::npos) return std::nullopt;
    std::vector<std::string> blocks;
    std::optional<std::string> current;
    auto flush = [&] {
        if (current) {
            auto t = trim(*current);
            if (!t.empty()) blocks.emplace_back(t);
            current.reset();
        }
    };
    for (auto line : split_lines(text)) {
        const auto t = trim(line);
        if (t == marker || t.substr(0, marker.size()) == marker) {
            flush();
            current.emplace(trim(t.substr(marker.size())));
            continue;
        }
        if (t == "END") {
            flush();
            break;
        }
        if (current) {
            if (!current->empty()) *current += '\n';
            *current += std::string(line);
        }
    }
    flush();
    return blocks;
}

std::string parse_opposite(std::string_view text) {
    constexpr std::string_view tag = "[OPPOSITE]";
    auto rest = text;
    if (auto pos = rest.find(tag); pos != std::string_view::npos) rest = rest.substr(pos + tag.size());
    rest = trim(rest);
    if (auto end = rest.find("[END]"); end != std::string_view::npos) rest = rest.substr(0, end);
    if (auto nl = rest.find('\n'); nl != std::string_view::npos) rest = rest.substr(0, nl);
    return std::string(trim(rest));
}

std::vector<std::string> parse_keywords(std::string_view text, int limit) {
    std::vector<std::string> out;
    for (auto line : split_lines(text)) {
        auto t = trim(line);
        if (t.empty() || t.front() != '*') continue;
        auto term = trim(t.substr(1));
        if (term.empty()) continue;
        if (std::find(out.begin(), out.end(), term) != out.end()) continue;
        out.emplace_back(term);
        if (static_cast<int>(out.size()) >= limit) break;
    }
    return out;
}

std::string parse_job(std::string_view text) {
    auto t = trim(text);
    if (auto nl = t.find('\n'); nl != std::string_view::npos) t = trim(t.substr(0, nl));
    while (!t.empty() && t.back() == '.') t.remove_suffix(1);
    return std::string(trim(t));
}

std::string rerender(const TemplateRegistry& templates, const StepRecord& step) {
    if (!step.is_llm()) return {};
    return templates.render(step.template_id, step.bindings);
}

// ---- chain machinery --------------------------------------------------------

namespace {

class Chain {
  public:
    Chain(const StrategyEnv& env, const Event& event, Date today, StrategyId strategy, const ChainOptions& opts)
        : env_(env), ctx_(event, today), opts_(opts) {
        if (today < event.created)
            throw PreconditionError("prediction date " + today.iso() + " precedes creation " + event.created.iso() +
                                    " of '" + event.id + "'");
        trace_.event_id = event.id;
        trace_.strategy = std::string(to_string(strategy));
        trace_.prediction_date = today;
    }

    const ChainOptions& opts() const { return opts_; }
    const RenderContext& ctx() const { return ctx_; }
    ChainTrace& trace() { return trace_; }
    const TemplateRegistry& templates() const { return env_.templates; }

    /// Builds and runs one LLM step without touching the trace, so it can be
    /// called from several threads.
    StepRecord call(std::string step_id, const std::string& template_id, const Bindings& extra, int n_samples,
                    const RenderContext* ctx = nullptr) const {
        const auto& tpl = env_.templates.get(template_id);
        Bindings all = (ctx ? *ctx : ctx_).bindings();
        for (const auto& [k, v] : extra) all[k] = v;

        StepRecord step;
        step.step_id = std::move(step_id);
        step.template_id = template_id;
        for (const auto& p : tpl.placeholders) {
            if (env_.templates.shared_bindings().count(p) > 0) continue;
            if (auto it = all.find(p); it != all.end()) step.bindings.emplace(p, it->second);
        }
        step.prompt = env_.templates.render(template_id, step.bindings);
        step.temperature = opts_.temperature;
        step.n_samples = n_samples;

        llm::CompletionRequest req;
        req.prompt = step.prompt;
        req.temperature = opts_.temperature;
        req.n_samples = n_samples;
        step.responses = llm::complete(env_.backend, req).texts;
        return step;
    }

    /// Extracts a probability from every sample of a prediction step.
    std::vector<double> extract(StepRecord& step) const {
        const auto scale = env_.templates.get(step.template_id).answer_scale;
        auto& extractor = env_.extractor ? *env_.extractor : env_.backend;
        std::vector<double> values;
        for (const auto& text : step.responses) {
            SampleExtraction s;
            try {
                auto e = extract_probability(extractor, env_.templates, text, scale);
                s.extractor_reply = std::move(e.extractor_reply);
                s.probability = e.probability;
                s.used_fallback = e.used_fallback;
                values.push_back(e.probability);
            } catch (const ExtractionFailed& err) {
                s.error = err.what();
            }
            step.extractions.push_back(std::move(s));
        }
        const auto failed = step.responses.size() - values.size();
        if (failed > 0 && !values.empty())
            step.warnings.push_back(std::to_string(failed) + " sample(s) yielded no probability and were dropped");
        if (!values.empty()) step.parsed = aggregate_probabilities(values);
        return values;
    }

    /// Final prediction step: samples, extraction, aggregation.
    void predict(const std::string& template_id, const Bindings& extra, const RenderContext* ctx = nullptr) {
        auto step = call("predict", template_id, extra, opts_.final_samples, ctx);
        auto values = extract(step);
        trace_.steps.push_back(std::move(step));
        if (values.empty()) fail("ExtractionFailed", "no sample of the final prediction yielded a probability");
        trace_.final_samples = std::move(values);
        trace_.final_probability = aggregate_probabilities(trace_.final_samples);
    }

    StepRecord& push(StepRecord step) {
        trace_.steps.push_back(std::move(step));
        return trace_.steps.back();
    }

    [[noreturn]] void fail(const Error& cause) { throw ChainError(trace_.event_id, trace_, cause); }
    [[noreturn]] void fail(std::string kind, const std::string& message) {
        throw ChainError(trace_.event_id, trace_, std::move(kind), message);
    }

    ChainTrace finish() { return std::move(trace_); }

  private:
    const StrategyEnv& env_;
    RenderContext ctx_;
    ChainOptions opts_;
    ChainTrace trace_;
};

/// Runs `body`, converting library errors into ChainError with the partial trace.
template <typename Body>
ChainTrace guarded(Chain& chain, Body body) {
    try {
        body();
    } catch (const ChainError&) {
        throw;
    } catch (const Error& e) {
        chain.fail(e);
    }
    return chain.finish();
}

ChainTrace single_prediction(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts,
                             StrategyId id, const std::string& template_id) {
    Chain chain(env, event, today, id, opts);
    return guarded(chain, [&] { chain.predict(template_id, {}); });
}

std::string render_sequence_list(const TemplateRegistry& templates, const std::string& item_template,
                                 const std::vector<std::string>& sequences) {
    if (sequences.empty()) return "None";
    std::vector<std::string> items;
    for (std::size_t i = 0; i < sequences.size(); ++i)
        items.push_back(templates.render(item_template, {{"i", std::to_string(i + 1)}, {"sequence", sequences[i]}}));
    return join(items, "\n");
}

/// Parses a sequences step reply into the step's `parsed` slot.
std::vector<std::string> parse_sequences_step(StepRecord& step, std::string_view marker) {
    const auto& text = step.responses.front();
    std::vector<std::string> seqs;
    if (auto blocks = parse_sequence_blocks(text, marker)) {
        seqs = std::move(*blocks);
    } else if (auto t = trim(text); !t.empty()) {
        seqs.emplace_back(t);
        step.warnings.push_back("no " + std::string(marker) + " marker; reply kept as one opaque sequence");
    }
    step.parsed = seqs;
    return seqs;
}

bool is_none_reply(std::string_view text) {
    auto t = trim(text);
    while (!t.empty() && t.back() == '.') t.remove_suffix(1);
    return t == "NONE";
}

}  // namespace

// ---- strategies -------------------------------------------------------------

ChainTrace run_basic(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts) {
    return single_prediction(env, event, today, opts, StrategyId::Basic, "basic/predict");
}

ChainTrace run_forecaster(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts) {
    return single_prediction(env, event, today, opts, StrategyId::Forecaster, "forecaster/predict");
}

ChainTrace run_basic_with_rationale(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts) {
    return single_prediction(env, event, today, opts, StrategyId::BasicWithRationale,
                             "basic_with_rationale/predict");
}

ChainTrace run_base_rate(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts) {
    Chain chain(env, event, today, StrategyId::BaseRate, opts);
    return guarded(chain, [&] {
        const int n = opts.intermediate_samples;
        auto& q = chain.push(chain.call("question", "base_rate/question", {}, n));
        q.parsed = q.responses.front();
        const auto question = q.responses.front();

        auto& a = chain.push(chain.call("answer", "base_rate/answer", {{"base rate question", question}}, n));
        a.parsed = a.responses.front();
        const auto base_rate = a.responses.front();

        chain.predict("base_rate/predict", {{"base rate", base_rate}});
    });
}

ChainTrace run_both_sides(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts) {
    Chain chain(env, event, today, StrategyId::BothSides, opts);
    return guarded(chain, [&] {
        const int n = opts.intermediate_samples;
        auto pros_f = std::async(std::launch::async, [&] { return chain.call("pros", "both_sides/pros", {}, n); });
        auto cons_f = std::async(std::launch::async, [&] { return chain.call("cons", "both_sides/cons", {}, n); });
        // collect both before surfacing either failure so no task outlives the chain
        std::optional<StepRecord> pros, cons;
        std::exception_ptr pros_err, cons_err;
        try {
            pros = pros_f.get();
        } catch (...) {
            pros_err = std::current_exception();
        }
        try {
            cons = cons_f.get();
        } catch (...) {
            cons_err = std::current_exception();
        }
        if (pros) {
            pros->parsed = pros->responses.front();
            chain.push(std::move(*pros));
        }
        if (pros_err) std::rethrow_exception(pros_err);
        if (cons_err) std::rethrow_exception(cons_err);
        cons->parsed = cons->responses.front();
        chain.push(std::move(*cons));

        const auto& steps = chain.trace().steps;
        chain.predict("both_sides/predict",
                      {{"pros", steps[0].responses.front()}, {"cons", steps[1].responses.front()}});
    });
}

ChainTrace run_sequences(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts) {
    Chain chain(env, event, today, StrategyId::Sequences, opts);
    return guarded(chain, [&] {
        const int n = opts.intermediate_samples;
        auto& pos = chain.push(chain.call("positive", "sequences/positive", {}, n));
        const auto positive = parse_sequences_step(pos, "[PATH TO POSITIVE OUTCOME]");

        auto& opp = chain.push(chain.call("opposite", "sequences/opposite", {}, n));
        const auto opposite = parse_opposite(opp.responses.front());
        opp.parsed = opposite;
        if (opposite.empty()) opp.warnings.push_back("no opposite event could be read");

        auto& neg = chain.push(chain.call("negative", "sequences/negative", {{"Opposite Event", opposite}}, n));
        const auto negative = parse_sequences_step(neg, "[PATH TO NEGATIVE OUTCOME]");

        const auto& t = chain.templates();
        chain.predict("sequences/predict",
                      {{"Positive Sequences", render_sequence_list(t, "sequences/positive_item", positive)},
                       {"Negative Sequences", render_sequence_list(t, "sequences/negative_item", negative)}});
    });
}

ChainTrace run_crowd(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts) {
    Chain chain(env, event, today, StrategyId::Crowd, opts);
    return guarded(chain, [&] {
        // one request for all personas so a sampled backend can return distinct experts
        auto& personas = chain.push(chain.call("personas", "crowd/persona", {}, opts.persona_count));
        std::vector<std::string> jobs;
        for (const auto& r : personas.responses) jobs.push_back(parse_job(r));
        personas.parsed = jobs;

        std::vector<double> persona_means;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            auto step = chain.call("persona_" + std::to_string(i + 1), "crowd/predict", {{"job", jobs[i]}},
                                   opts.final_samples);
            if (jobs[i].empty()) step.warnings.push_back("empty persona reply");
            const auto values = chain.extract(step);
            if (values.empty()) step.warnings.push_back("persona dropped: no sample yielded a probability");
            else persona_means.push_back(aggregate_probabilities(values));
            chain.push(std::move(step));
        }
        if (persona_means.empty()) chain.fail("ExtractionFailed", "every persona failed extraction");
        chain.trace().final_samples = persona_means;
        chain.trace().final_probability = aggregate_probabilities(persona_means);
    });
}

namespace {

StepRecord query_step(news::HeadlineClient* client, news::Source source, const news::QueryWindow& q) {
    StepRecord step;
    step.step_id = std::string("query_") + std::string(news::to_string(source));
    step.bindings = {{"terms", join(q.terms, " ")}, {"until", q.until.iso()}, {"max_results", std::to_string(q.max_results)}};
    std::vector<news::Headline> found;
    if (client == nullptr) {
        step.warnings.push_back("source not configured; treated as NONE");
    } else {
        try {
            found = client->query(q);
        } catch (const Error& e) {
            step.warnings.push_back(std::string("query failed (") + e.kind() + "): " + e.what() + "; treated as NONE");
        }
    }
    // every headline past the prediction date is dropped here, whatever the client did
    found = news::bound_and_normalize(std::move(found), q);
    std::vector<std::string> lines;
    const auto text = news::format_headlines(found);
    if (!text.empty())
        for (auto line : split_lines(text)) lines.emplace_back(line);
    step.parsed = lines;
    return step;
}

std::string parsed_text_lines(const StepRecord& step) {
    return join(std::get<std::vector<std::string>>(step.parsed), "\n");
}

}  // namespace

ChainTrace run_news(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts) {
    Chain chain(env, event, today, StrategyId::News, opts);
    return guarded(chain, [&] {
        const int n = opts.intermediate_samples;
        auto& kw = chain.push(chain.call("keywords", "news/keywords",
                                         {{"number of terms", std::to_string(opts.keyword_count)}}, n));
        const auto terms = parse_keywords(kw.responses.front(), opts.keyword_count);
        kw.parsed = terms;
        if (terms.empty()) chain.fail(StepParseError("keywords", "no '*'-prefixed search terms in reply"));

        const news::QueryWindow q{terms, today, opts.max_results};
        auto hn_f = std::async(std::launch::async,
                               [&] { return query_step(env.hackernews, news::Source::HackerNews, q); });
        auto nyt_f = std::async(std::launch::async, [&] { return query_step(env.nyt, news::Source::NYT, q); });
        auto hn_step = hn_f.get();
        auto nyt_step = nyt_f.get();
        const auto hn_text = parsed_text_lines(hn_step);
        const auto nyt_text = parsed_text_lines(nyt_step);
        chain.push(std::move(hn_step));
        chain.push(std::move(nyt_step));

        const std::string none = chain.templates().get("news/none_section").body;

        std::string hn_section = none;
        if (!hn_text.empty()) {
            auto& f = chain.push(chain.call("hn_filter", "news/hn_filter", {{"Hackernews headlines", hn_text}}, n));
            f.parsed = f.responses.front();
            if (!is_none_reply(f.responses.front())) hn_section = f.responses.front();
        }

        std::string nyt_section = none;
        if (!nyt_text.empty()) {
            auto& x = chain.push(chain.call("nyt_extract", "news/nyt_extract", {{"NYT headlines", nyt_text}}, n));
            x.parsed = x.responses.front();
            const auto extracted = x.responses.front();
            if (!is_none_reply(extracted)) {
                auto& p = chain.push(
                    chain.call("nyt_paraphrase", "news/nyt_paraphrase", {{"filtered NYT headlines", extracted}}, n));
                p.parsed = p.responses.front();
                if (!is_none_reply(p.responses.front())) nyt_section = p.responses.front();
            }
        }

        chain.predict("news/predict",
                      {{"filtered Hackernews headlines", hn_section}, {"summarized NYT headlines", nyt_section}});
    });
}

ChainTrace run_reversed(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts) {
    Chain chain(env, event, today, StrategyId::Reversed, opts);
    return guarded(chain, [&] {
        auto& opp = chain.push(chain.call("opposite", "sequences/opposite", {}, opts.intermediate_samples));
        const auto opposite = parse_opposite(opp.responses.front());
        opp.parsed = opposite;
        if (opposite.empty()) chain.fail(StepParseError("opposite", "no reworded condition in reply"));

        Event reworded = event;
        reworded.condition = opposite;
        const RenderContext ctx(reworded, today);
        chain.predict("basic/predict", {}, &ctx);

        auto& t = chain.trace();
        const double raw = t.final_probability;
        t.raw_probability = raw;
        for (auto& s : t.final_samples) s = 1.0 - s;
        t.final_probability = 1.0 - raw;
    });
}

ChainTrace run_strategy(const StrategyEnv& env, const StrategySpec& spec, const Event& event, Date today) {
    const auto opts = spec.options();
    switch (spec.id) {
        case StrategyId::Basic: return run_basic(env, event, today, opts);
        case StrategyId::Forecaster: return run_forecaster(env, event, today, opts);
        case StrategyId::BaseRate: return run_base_rate(env, event, today, opts);
        case StrategyId::BothSides: return run_both_sides(env, event, today, opts);
        case StrategyId::Sequences: return run_sequences(env, event, today, opts);
        case StrategyId::Crowd: return run_crowd(env, event, today, opts);
        case StrategyId::News: return run_news(env, event, today, opts);
        case StrategyId::Reversed: return run_reversed(env, event, today, opts);
        case StrategyId::BasicWithRationale: return run_basic_with_rationale(env, event, today, opts);
    }
    throw ConfigError("unhandled strategy");
}

// ---- records and traces -----------------------------------------------------

ForecastRecord to_forecast(const ChainTrace& trace, std::optional<std::string> trace_ref) {
    ForecastRecord r;
    r.event_id = trace.event_id;
    r.strategy = trace.strategy;
    r.prediction_date = trace.prediction_date;
    r.probability = trace.final_probability;
    r.samples = trace.final_samples;
    r.trace_ref = std::move(trace_ref);
    return r;
}

namespace {

ordered_json parsed_to_json(const Parsed& p) {
    ordered_json j;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                j = nullptr;
            } else if constexpr (std::is_same_v<T, std::string>) {
                j = {{"text", v}};
            } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
                j = {{"texts", v}};
            } else {
                j = {{"probability", v}};
            }
        },
        p);
    return j;
}

Parsed parsed_from_json(const json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.contains("text")) return j.at("text").get<std::string>();
    if (j.contains("texts")) return j.at("texts").get<std::vector<std::string>>();
    return j.at("probability").get<double>();
}

}  // namespace

ordered_json trace_to_json(const ChainTrace& trace) {
    ordered_json j;
    j["event_id"] = trace.event_id;
    j["strategy"] = trace.strategy;
    j["prediction_date"] = trace.prediction_date.iso();
    j["final_probability"] = trace.final_probability;
    if (trace.raw_probability) j["raw_probability"] = *trace.raw_probability;
    j["final_samples"] = trace.final_samples;
    j["steps"] = ordered_json::array();
    for (const auto& s : trace.steps) {
        ordered_json step;
        step["step_id"] = s.step_id;
        step["template_id"] = s.template_id;
        ordered_json b = ordered_json::object();
        for (const auto& [k, v] : s.bindings) b[k] = v;
        step["bindings"] = b;
        step["prompt"] = s.prompt;
        step["temperature"] = s.temperature;
        step["n_samples"] = s.n_samples;
        step["responses"] = s.responses;
        step["parsed"] = parsed_to_json(s.parsed);
        if (!s.extractions.empty()) {
            ordered_json ex = ordered_json::array();
            for (const auto& e : s.extractions) {
                ordered_json x;
                x["extractor_reply"] = e.extractor_reply;
                x["probability"] = e.probability ? ordered_json(*e.probability) : ordered_json(nullptr);
                x["used_fallback"] = e.used_fallback;
                if (!e.error.empty()) x["error"] = e.error;
                ex.push_back(std::move(x));
            }
            step["extractions"] = std::move(ex);
        }
        if (!s.warnings.empty()) step["warnings"] = s.warnings;
        j["steps"].push_back(std::move(step));
    }
    return j;
}

ChainTrace trace_from_json(const json& j) {
    ChainTrace t;
    t.event_id = j.at("event_id").get<std::string>();
    t.strategy = j.at("strategy").get<std::string>();
    t.prediction_date = Date::from_iso(j.at("prediction_date").get<std::string>());
    t.final_probability = j.at("final_probability").get<double>();
    if (j.contains("raw_probability")) t.raw_probability = j.at("raw_probability").get<double>();
    t.final_samples = j.at("final_samples").get<std::vector<double>>();
    for (const auto& sj : j.at("steps")) {
        StepRecord s;
        s.step_id = sj.at("step_id").get<std::string>();
        s.template_id = sj.at("template_id").get<std::string>();
        for (const auto& [k, v] : sj.at("bindings").items()) s.bindings.emplace(k, v.get<std::string>());
        s.prompt = sj.at("prompt").get<std::string>();
        s.temperature = sj.at("temperature").get<double>();
        s.n_samples = sj.at("n_samples").get<int>();
        s.responses = sj.at("responses").get<std::vector<std::string>>();
        s.parsed = parsed_from_json(sj.at("parsed"));
        if (sj.contains("extractions")) {
            for (const auto& xj : sj.at("extractions")) {
                SampleExtraction x;
                x.extractor_reply = xj.at("extractor_reply").get<std::string>();
                if (!xj.at("probability").is_null()) x.probability = xj.at("probability").get<double>();
                x.used_fallback = xj.at("used_fallback").get<bool>();
                x.error = xj.value("error", std::string{});
                s.extractions.push_back(std::move(x));
            }
        }
        if (sj.contains("warnings")) s.warnings = sj.at("warnings").get<std::vector<std::string>>();
        t.steps.push_back(std::move(s));
    }
    return t;
}

std::filesystem::path trace_path(const std::filesystem::path& dir, const ChainTrace& trace) {
    std::string name = trace.event_id;
    for (auto& c : name) {
        const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        if (!safe) c = '_';
    }
    if (name.empty() || name == "." || name == "..") name = "_" + name;
    return dir / trace.strategy / (name + ".json");
}

std::filesystem::path write_trace(const std::filesystem::path& dir, const ChainTrace& trace) {
    const auto path = trace_path(dir, trace);
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", "cannot write " + path.string());
    out << trace_to_json(trace).dump(2) << '\n';
    if (!out) throw Error("IoError", "write failed for " + path.string());
    return path;
}

}  // namespace foresight
