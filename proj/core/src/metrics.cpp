// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "foresight/error.hpp"

namespace foresight {

using nlohmann::json;
using nlohmann::ordered_json;

void ForecastRecord::validate() const {
    if (!(probability >= 0.0 && probability <= 1.0))
        throw InvalidForecast("forecast for '" + event_id + "' has probability outside [0,1]");
    if (samples.empty()) return;
    double sum = 0.0;
    for (double s : samples) {
        if (!(s >= 0.0 && s <= 1.0)) throw InvalidForecast("forecast for '" + event_id + "' has a sample outside [0,1]");
        sum += s;
    }
    if (std::abs(sum / static_cast<double>(samples.size()) - probability) > 1e-9)
        throw InvalidForecast("forecast for '" + event_id + "' disagrees with its sample mean");
}

double brier(std::span<const ScoredPair> pairs) {
    if (pairs.empty()) throw EmptyInput("brier");
    double sum = 0.0;
    for (const auto& [p, o] : pairs) {
        const double err = p - static_cast<double>(o);
        sum += err * err;
    }
    return sum / static_cast<double>(pairs.size());
}

double weighted_brier(std::span<const ScoredPair> yes_pairs, std::span<const ScoredPair> no_pairs) {
    if (yes_pairs.empty()) throw EmptyClass("yes");
    if (no_pairs.empty()) throw EmptyClass("no");
    return (brier(yes_pairs) + brier(no_pairs)) / 2.0;
}

ScoreReport score(std::span<const ForecastRecord> forecasts, const DatasetSplit& split) {
    if (forecasts.empty()) throw EmptyInput("score");
    std::vector<ScoredPair> all, yes, no;
    std::map<Category, std::vector<ScoredPair>> by_category;
    double prob_sum = 0.0;
    for (const auto& f : forecasts) {
        const Event* e = split.find(f.event_id);
        if (!e) throw UnknownEvent(f.event_id);
        const int o = outcome_indicator(*e);
        const ScoredPair pair{f.probability, o};
        all.push_back(pair);
        (o == 1 ? yes : no).push_back(pair);
        by_category[e->category].push_back(pair);
        prob_sum += f.probability;
    }

    ScoreReport r;
    r.n_total = all.size();
    r.n_yes = yes.size();
    r.n_no = no.size();
    r.brier = brier(all);
    if (!yes.empty()) r.brier_yes = brier(yes);
    if (!no.empty()) r.brier_no = brier(no);
    if (r.brier_yes && r.brier_no) r.weighted_brier = weighted_brier(yes, no);
    for (const auto& [cat, pairs] : by_category) r.per_category[cat] = CategoryScore{pairs.size(), brier(pairs)};
    r.mean_prediction = prob_sum / static_cast<double>(all.size());
    return r;
}

std::vector<ForecastRecord> market_forecasts(const DatasetSplit& split, Date date, const std::string& strategy) {
    std::vector<ForecastRecord> out;
    for (const auto& e : active_events(split, date)) {
        if (!e.resolved()) continue;
        const MarketSnapshot* s = split.snapshot_for(e.id, date);
        if (!s) throw MissingSnapshot(e.id, date.iso());
        out.push_back(ForecastRecord{e.id, strategy, date, market_point_prediction(*s), {}, std::nullopt});
    }
    return out;
}

double coherence_sum(double mean_forward, double mean_reversed) { return mean_forward + mean_reversed; }

std::vector<ShiftRow> prediction_shift(std::span<const EventProbability> just_answer,
                                       std::span<const EventProbability> with_rationale) {
    std::map<std::string, double> ja, wr;
    for (const auto& [id, p] : just_answer) ja[id] = p;
    for (const auto& [id, p] : with_rationale) wr[id] = p;

    std::set<std::string> missing;
    for (const auto& [id, p] : ja)
        if (!wr.contains(id)) missing.insert(id);
    for (const auto& [id, p] : wr)
        if (!ja.contains(id)) missing.insert(id);
    if (!missing.empty()) throw MismatchedEventSets({missing.begin(), missing.end()});

    std::vector<ShiftRow> rows;
    rows.reserve(ja.size());
    for (const auto& [id, p_just] : ja) {
        const double p_rat = wr.at(id);
        rows.push_back(ShiftRow{id, p_just, p_rat, p_rat - p_just});
    }
    return rows;
}

// ---- forecast files ---------------------------------------------------------

std::string serialize_forecast(const ForecastRecord& r) {
    ordered_json obj;
    obj["event_id"] = r.event_id;
    obj["strategy"] = r.strategy;
    obj["prediction_date"] = r.prediction_date.iso();
    obj["probability"] = r.probability;
    if (!r.samples.empty()) obj["samples"] = r.samples;
    if (r.trace_ref) obj["trace_ref"] = *r.trace_ref;
    return obj.dump();
}

ForecastRecord parse_forecast(const std::string& line) {
    json obj = json::parse(line);
    if (!obj.is_object()) throw std::invalid_argument("record is not an object");
    ForecastRecord r;
    r.event_id = obj.at("event_id").get<std::string>();
    r.strategy = obj.at("strategy").get<std::string>();
    r.prediction_date = Date::from_iso(obj.at("prediction_date").get<std::string>());
    r.probability = obj.at("probability").get<double>();
    if (auto it = obj.find("samples"); it != obj.end() && !it->is_null()) r.samples = it->get<std::vector<double>>();
    if (auto it = obj.find("trace_ref"); it != obj.end() && !it->is_null()) r.trace_ref = it->get<std::string>();
    return r;
}

std::vector<ForecastRecord> read_forecasts(std::istream& in) {
    std::vector<ForecastRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_forecast(line));
            out.back().validate();
        } catch (const InvalidForecast& e) {
            throw MalformedRecord(line_no, e.what());
        } catch (const std::exception& e) {
            throw MalformedRecord(line_no, e.what());
        }
    }
    return out;
}

std::vector<ForecastRecord> load_forecasts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open forecast file '" + path + "'");
    return read_forecasts(in);
}

void write_forecasts(std::ostream& out, std::span<const ForecastRecord> records) {
    for (const auto& r : records) out << serialize_forecast(r) << '\n';
}

// ---- rendering --------------------------------------------------------------

std::string format4(double v) {
    const double scaled = v * 1e4;
    double whole = std::floor(scaled);
    const double frac = scaled - whole;
    if (std::abs(frac - 0.5) < 1e-6) {
        if (std::fmod(whole, 2.0) != 0.0) whole += 1.0;
    } else if (frac > 0.5) {
        whole += 1.0;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", whole / 1e4);
    return buf;
}

namespace {

std::string opt4(const std::optional<double>& v) { return v ? format4(*v) : "n/a"; }

}  // namespace

std::string render_report_table(const std::vector<std::pair<std::string, ScoreReport>>& columns) {
    std::ostringstream out;
    out << "|                 |";
    for (const auto& [name, r] : columns) out << ' ' << name << " |";
    out << "\n|-----------------|";
    for (std::size_t i = 0; i < columns.size(); ++i) out << "---|";
    out << '\n';

    auto row = [&](const char* label, auto&& cell) {
        out << "| " << label << " |";
        for (const auto& [name, r] : columns) out << ' ' << cell(r) << " |";
        out << '\n';
    };
    row("Resolve Yes    ", [](const ScoreReport& r) { return opt4(r.brier_yes); });
    row("Resolve No     ", [](const ScoreReport& r) { return opt4(r.brier_no); });
    row("Weighted       ", [](const ScoreReport& r) { return opt4(r.weighted_brier); });
    row("Brier          ", [](const ScoreReport& r) { return format4(r.brier); });
    row("Mean prediction", [](const ScoreReport& r) { return format4(r.mean_prediction); });
    row("N (yes/no)     ", [](const ScoreReport& r) {
        return std::to_string(r.n_total) + " (" + std::to_string(r.n_yes) + "/" + std::to_string(r.n_no) + ")";
    });
    for (Category cat : {Category::Covid19, Category::Finance, Category::TechIndustry, Category::Misc}) {
        std::string label = "Brier [" + std::string(to_string(cat)) + "]";
        label.resize(15, ' ');
        row(label.c_str(), [cat](const ScoreReport& r) {
            auto it = r.per_category.find(cat);
            if (it == r.per_category.end()) return std::string("n/a");
            return format4(it->second.brier) + " (n=" + std::to_string(it->second.count) + ")";
        });
    }
    out << "\nLower is better.\n";
    return out.str();
}

std::string render_report_json(const std::vector<std::pair<std::string, ScoreReport>>& columns) {
    ordered_json root = ordered_json::object();
    for (const auto& [name, r] : columns) {
        ordered_json o;
        o["n_total"] = r.n_total;
        o["n_yes"] = r.n_yes;
        o["n_no"] = r.n_no;
        o["brier"] = r.brier;
        o["brier_yes"] = r.brier_yes ? ordered_json(*r.brier_yes) : ordered_json(nullptr);
        o["brier_no"] = r.brier_no ? ordered_json(*r.brier_no) : ordered_json(nullptr);
        o["weighted_brier"] = r.weighted_brier ? ordered_json(*r.weighted_brier) : ordered_json(nullptr);
        ordered_json cats = ordered_json::object();
        for (const auto& [cat, cs] : r.per_category)
            cats[std::string(to_string(cat))] = ordered_json{{"count", cs.count}, {"brier", cs.brier}};
        o["per_category"] = std::move(cats);
        o["mean_prediction"] = r.mean_prediction;
        root[name] = std::move(o);
    }
    return root.dump(2) + "\n";
}

}  // namespace foresight
