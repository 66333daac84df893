// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "foresight/error.hpp"
#include "foresight/events.hpp"
#include "foresight/llm/cache.hpp"
#include "foresight/llm/http_backend.hpp"
#include "foresight/llm/scripted_backend.hpp"
#include "foresight/metrics.hpp"
#include "foresight/prompts.hpp"
#include "foresight/strategies.hpp"

namespace foresight::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

/// Backend stack built for one run: innermost provider plus optional cache.
struct Backends {
    std::unique_ptr<llm::ScriptedBackend> scripted;
    std::unique_ptr<llm::HttpBackend> http;
    std::unique_ptr<llm::CachingBackend> cache;

    llm::CompletionBackend& top() {
        if (cache) return *cache;
        if (scripted) return *scripted;
        return *http;
    }
    std::size_t calls() const {
        if (scripted) return scripted->calls();
        return http ? http->provider_calls() : 0;
    }
};

Backends make_backends(const RunConfig& cfg) {
    Backends b;
    if (cfg.backend.rfind("mock:", 0) == 0) {
        const auto path = cfg.backend.substr(5);
        if (path.empty()) throw ConfigError("--backend mock: needs a rules file path");
        try {
            b.scripted = llm::ScriptedBackend::from_file(path);
        } catch (const Error& e) {
            throw ConfigError(std::string("cannot load mock rules: ") + e.what());
        }
    } else if (cfg.backend == "live") {
        b.http = std::make_unique<llm::HttpBackend>(llm::HttpBackendConfig::from_env(cfg.model));
    } else {
        throw ConfigError("unknown backend '" + cfg.backend + "' (expected live or mock:<path>)");
    }
    if (cfg.replay_only && !cfg.cache) throw ConfigError("--replay-only requires --cache");
    if (cfg.cache) {
        auto& inner = b.scripted ? static_cast<llm::CompletionBackend&>(*b.scripted) : *b.http;
        b.cache = std::make_unique<llm::CachingBackend>(
            inner, *cfg.cache / "llm", cfg.replay_only ? llm::CacheMode::ReplayOnly : llm::CacheMode::ReadWrite);
    }
    return b;
}

struct NewsClients {
    std::unique_ptr<news::HackerNewsClient> hn;
    std::unique_ptr<news::NytClient> nyt;
    std::unique_ptr<news::CachingHeadlineClient> hn_cache;
    std::unique_ptr<news::CachingHeadlineClient> nyt_cache;

    news::HeadlineClient* hackernews() {
        return hn_cache ? static_cast<news::HeadlineClient*>(hn_cache.get()) : hn.get();
    }
    news::HeadlineClient* times() { return nyt_cache ? static_cast<news::HeadlineClient*>(nyt_cache.get()) : nyt.get(); }
    std::size_t calls() const { return (hn ? hn->network_calls() : 0) + (nyt ? nyt->network_calls() : 0); }
};

NewsClients make_news(const RunConfig& cfg) {
    NewsClients c;
    news::HttpOptions hn_opts;
    hn_opts.base_url = cfg.hn_endpoint;
    news::HttpOptions nyt_opts;
    nyt_opts.base_url = cfg.nyt_endpoint;
    c.hn = std::make_unique<news::HackerNewsClient>(hn_opts);
    c.nyt = std::make_unique<news::NytClient>(nyt_opts);
    if (cfg.cache) {
        c.hn_cache = std::make_unique<news::CachingHeadlineClient>(*c.hn, *cfg.cache / "news", cfg.replay_only);
        c.nyt_cache = std::make_unique<news::CachingHeadlineClient>(*c.nyt, *cfg.cache / "news", cfg.replay_only);
    }
    return c;
}

}  // namespace

RunResult cmd_run(const RunConfig& cfg, std::ostream& log) {
    const auto spec = StrategySpec::parse(cfg.strategy, cfg.parameters);
    if (cfg.workers < 1) throw ConfigError("--workers must be at least 1");
    if (cfg.out.empty()) throw ConfigError("--out is required");

    TemplateRegistry templates;
    try {
        templates = TemplateRegistry::load(cfg.templates ? *cfg.templates : TemplateRegistry::default_dir());
    } catch (const TemplateError& e) {
        throw ConfigError(e.what());
    }

    DatasetSplit split;
    try {
        split = load_dataset(cfg.events.string());
    } catch (const Error& e) {
        throw ConfigError(std::string("cannot load events: ") + e.what());
    }

    auto backends = make_backends(cfg);
    NewsClients news_clients;
    if (spec.id == StrategyId::News) news_clients = make_news(cfg);

    const auto traces_dir = cfg.traces ? *cfg.traces : cfg.out.parent_path() / "traces";
    const auto events = active_events(split, cfg.date);

    auto out = open_out(cfg.out);
    RunResult result;
    if (events.empty()) {
        log << "warning: no events active on " << cfg.date.iso() << "; wrote an empty forecast file\n";
        return result;
    }

    StrategyEnv env{backends.top(), templates, nullptr, news_clients.hackernews(), news_clients.times()};

    std::vector<std::optional<ForecastRecord>> records(events.size());
    std::vector<std::string> errors(events.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < events.size(); i = next.fetch_add(1)) {
            const auto& ev = events[i];
            try {
                auto trace = run_strategy(env, spec, ev, cfg.date);
                const auto path = write_trace(traces_dir, trace);
                records[i] = to_forecast(trace, std::filesystem::relative(path, traces_dir).generic_string());
            } catch (const ChainError& e) {
                errors[i] = std::string(e.kind()) + ": " + e.what();
                try {
                    write_trace(traces_dir, e.partial_trace());
                } catch (const Error&) {
                }
            } catch (const Error& e) {
                errors[i] = std::string(e.kind()) + ": " + ev.id + ": " + e.what();
            } catch (const std::exception& e) {
                errors[i] = ev.id + ": " + e.what();
            }
        }
    };
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), events.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<ForecastRecord> ok;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (records[i]) ok.push_back(std::move(*records[i]));
        else log << "error: " << errors[i] << '\n';
    }
    write_forecasts(out, ok);
    out.flush();
    if (!out) throw Error("IoError", "write failed for " + cfg.out.string());

    result.forecasts = ok.size();
    result.failures = events.size() - ok.size();
    result.backend_calls = backends.calls();
    result.news_calls = news_clients.calls();
    result.exit_code = result.failures > 0 ? kExitPartial : kExitOk;
    log << "forecast " << result.forecasts << " of " << events.size() << " events with " << to_string(spec.id) << '\n';
    return result;
}

// ---- score ------------------------------------------------------------------

int cmd_score(const ScoreConfig& cfg, std::ostream& out) {
    const auto split = load_dataset(cfg.events.string());
    std::vector<ForecastRecord> records;
    if (cfg.from_market) records = market_forecasts(split, *cfg.from_market);
    if (cfg.forecasts) {
        auto more = load_forecasts(cfg.forecasts->string());
        records.insert(records.end(), more.begin(), more.end());
    }
    if (!cfg.from_market && !cfg.forecasts) throw ConfigError("score needs --forecasts or --from-market");

    // one column per strategy, in order of first appearance
    std::vector<std::pair<std::string, std::vector<ForecastRecord>>> groups;
    for (auto& r : records) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == r.strategy; });
        if (it == groups.end()) {
            groups.emplace_back(r.strategy, std::vector<ForecastRecord>{});
            it = std::prev(groups.end());
        }
        it->second.push_back(std::move(r));
    }
    if (groups.empty()) throw EmptyInput("forecast file");

    std::vector<std::pair<std::string, ScoreReport>> columns;
    for (const auto& [name, recs] : groups) columns.emplace_back(name, score(recs, split));
    out << render_report_table(columns);
    if (cfg.report) {
        auto f = open_out(*cfg.report);
        f << render_report_json(columns) << '\n';
    }
    return kExitOk;
}

// ---- bias -------------------------------------------------------------------

namespace {

std::vector<EventProbability> probabilities(const std::vector<ForecastRecord>& records) {
    std::vector<EventProbability> out;
    for (const auto& r : records) out.push_back({r.event_id, r.probability});
    return out;
}

double mean_of(const std::vector<ForecastRecord>& records) {
    double sum = 0.0;
    for (const auto& r : records) sum += r.probability;
    return sum / static_cast<double>(records.size());
}

}  // namespace

BiasReport compute_bias(const BiasConfig& cfg) {
    const auto forward = load_forecasts(cfg.forward.string());
    const auto reversed = load_forecasts(cfg.reversed.string());
    if (forward.empty()) throw EmptyInput("forward forecasts");
    if (reversed.empty()) throw EmptyInput("reversed forecasts");
    // joins on event id and rejects one-sided events
    const auto f = probabilities(forward);
    const auto r = probabilities(reversed);
    const auto rows = prediction_shift(f, r);

    BiasReport rep;
    rep.n = rows.size();
    rep.mean_forward = mean_of(forward);
    rep.mean_one_minus_reversed = mean_of(reversed);
    // the reversed file stores 1 - p(reworded); coherence adds p(reworded) back
    rep.coherence = coherence_sum(rep.mean_forward, 1.0 - rep.mean_one_minus_reversed);
    if (cfg.events) {
        const auto split = load_dataset(cfg.events->string());
        rep.brier_forward = score(forward, split).brier;
        rep.brier_reversed = score(reversed, split).brier;
    }
    return rep;
}

std::string render_bias(const BiasReport& r) {
    std::ostringstream out;
    out << "| | Forward | 1 - Reversed |\n";
    out << "|---|---|---|\n";
    out << "| Average Probability | " << format4(r.mean_forward) << " | " << format4(r.mean_one_minus_reversed)
        << " |\n";
    if (r.brier_forward && r.brier_reversed)
        out << "| Brier Score | " << format4(*r.brier_forward) << " | " << format4(*r.brier_reversed) << " |\n";
    out << "\nEvents: " << r.n << "\n";
    out << "Coherence sum (forward + reversed): " << format4(r.coherence) << " (1.0000 when coherent)\n";
    return out.str();
}

int cmd_bias(const BiasConfig& cfg, std::ostream& out) {
    out << render_bias(compute_bias(cfg));
    return kExitOk;
}

// ---- rationale --------------------------------------------------------------

int cmd_rationale(const RationaleConfig& cfg, std::ostream& out) {
    const auto just = load_forecasts(cfg.just.string());
    const auto with = load_forecasts(cfg.rationale.string());
    const auto rows = prediction_shift(probabilities(just), probabilities(with));
    if (rows.empty()) throw EmptyInput("rationale comparison");

    out << "event_id\tp_just\tp_rationale\tdelta\n";
    double sj = 0.0, sr = 0.0, sd = 0.0;
    out << std::setprecision(17);
    for (const auto& row : rows) {
        out << row.event_id << '\t' << row.p_just << '\t' << row.p_rationale << '\t' << row.delta << '\n';
        sj += row.p_just;
        sr += row.p_rationale;
        sd += row.delta;
    }
    const auto n = static_cast<double>(rows.size());
    out << "# mean_p_just\t" << format4(sj / n) << '\n';
    out << "# mean_p_rationale\t" << format4(sr / n) << '\n';
    out << "# mean_delta\t" << format4(sd / n) << '\n';
    return kExitOk;
}

// ---- argument parsing -------------------------------------------------------

namespace {

Date parse_date_flag(const std::string& text, const std::string& flag) {
    auto d = Date::parse(text);
    if (!d) throw ConfigError(flag + " must be a date in YYYY-MM-DD form, got '" + text + "'");
    return *d;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Forecasting strategies, scoring and bias reports over binary events"};
    app.set_config("--config", "", "key = value file supplying any flag; flags on the command line win");
    app.require_subcommand(1);

    RunConfig run;
    std::string run_date, out_path, traces, cache, templates;
    std::optional<int> persona_count, keyword_count;
    auto* run_cmd = app.add_subcommand("run", "Forecast every event active on --date");
    run_cmd->add_option("--events", run.events, "Line-delimited event file")->required();
    run_cmd->add_option("--date", run_date, "Prediction date (YYYY-MM-DD)")->required();
    run_cmd->add_option("--strategy", run.strategy, "Strategy id")->capture_default_str();
    run_cmd->add_option("--backend", run.backend, "live | mock:<rules file>")->capture_default_str();
    run_cmd->add_option("--model", run.model, "Model name for the live backend")->capture_default_str();
    run_cmd->add_option("--out", out_path, "Forecast output file")->required();
    run_cmd->add_option("--traces", traces, "Trace directory (default: <out dir>/traces)");
    run_cmd->add_option("--cache", cache, "Record/replay cache directory");
    run_cmd->add_flag("--replay-only", run.replay_only, "Serve everything from --cache; never call out");
    run_cmd->add_option("--workers", run.workers, "Concurrent events")->capture_default_str();
    run_cmd->add_option("--persona-count", persona_count, "Crowd personas");
    run_cmd->add_option("--keyword-count", keyword_count, "News search terms");
    run_cmd->add_option("--samples", run.parameters["samples"], "Samples per final prediction");
    run_cmd->add_option("--hn-endpoint", run.hn_endpoint, "Hacker News search base URL");
    run_cmd->add_option("--nyt-endpoint", run.nyt_endpoint, "NYT article search base URL");
    run_cmd->add_option("--templates", templates, "Prompt template directory");

    ScoreConfig score_cfg;
    std::string score_forecasts, market_date, report;
    auto* score_cmd = app.add_subcommand("score", "Score a forecast file against resolved events");
    score_cmd->add_option("--events", score_cfg.events, "Line-delimited event file")->required();
    score_cmd->add_option("--forecasts", score_forecasts, "Forecast file");
    score_cmd->add_option("--from-market", market_date, "Also score market midpoints on this date");
    score_cmd->add_option("--report", report, "Write the structured report here");

    BiasConfig bias_cfg;
    std::string bias_events;
    auto* bias_cmd = app.add_subcommand("bias", "Coherence of forward and reversed forecasts");
    bias_cmd->add_option("--forward", bias_cfg.forward, "Forward forecast file")->required();
    bias_cmd->add_option("--reversed", bias_cfg.reversed, "Reversed-strategy forecast file")->required();
    bias_cmd->add_option("--events", bias_events, "Event file, enables Brier rows");

    RationaleConfig rat_cfg;
    auto* rat_cmd = app.add_subcommand("rationale", "Per-event shift between answer-only and rationale runs");
    rat_cmd->add_option("--just", rat_cfg.just, "Answer-only forecast file")->required();
    rat_cmd->add_option("--rationale", rat_cfg.rationale, "With-rationale forecast file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (*run_cmd) {
            run.date = parse_date_flag(run_date, "--date");
            run.out = out_path;
            if (!traces.empty()) run.traces = traces;
            if (!cache.empty()) run.cache = cache;
            if (!templates.empty()) run.templates = templates;
            if (run.parameters["samples"].empty()) run.parameters.erase("samples");
            if (persona_count) {
                if (run.strategy != "crowd") throw ConfigError("--persona-count only applies to the crowd strategy");
                run.parameters["persona_count"] = std::to_string(*persona_count);
            }
            if (keyword_count) {
                if (run.strategy != "news") throw ConfigError("--keyword-count only applies to the news strategy");
                run.parameters["keyword_count"] = std::to_string(*keyword_count);
            }
            return cmd_run(run, err).exit_code;
        }
        if (*score_cmd) {
            if (!score_forecasts.empty()) score_cfg.forecasts = score_forecasts;
            if (!market_date.empty()) score_cfg.from_market = parse_date_flag(market_date, "--from-market");
            if (!report.empty()) score_cfg.report = report;
            return cmd_score(score_cfg, out);
        }
        if (*bias_cmd) {
            if (!bias_events.empty()) bias_cfg.events = bias_events;
            return cmd_bias(bias_cfg, out);
        }
        if (*rat_cmd) return cmd_rationale(rat_cfg, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error (" << e.kind() << "): " << e.what() << '\n';
        return kExitPartial;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitPartial;
    }
    return kExitConfig;
}

}  // namespace foresight::cli
