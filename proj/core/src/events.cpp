// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/events.hpp"

#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "foresight/error.hpp"

namespace foresight {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Category c) {
    switch (c) {
        case Category::Covid19: return "covid19";
        case Category::Finance: return "finance";
        case Category::TechIndustry: return "tech";
        case Category::Misc: return "misc";
    }
    return "misc";
}

std::optional<Category> parse_category(std::string_view s) {
    if (s == "covid19") return Category::Covid19;
    if (s == "finance") return Category::Finance;
    if (s == "tech") return Category::TechIndustry;
    if (s == "misc") return Category::Misc;
    return std::nullopt;
}

const Event* DatasetSplit::find(std::string_view id) const {
    for (const auto& e : events)
        if (e.id == id) return &e;
    return nullptr;
}

const MarketSnapshot* DatasetSplit::snapshot_for(std::string_view event_id, Date date) const {
    for (const auto& s : snapshots)
        if (s.event_id == event_id && s.date == date) return &s;
    return nullptr;
}

namespace {

struct LineError {
    std::string reason;
};

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw LineError{std::string("missing field '") + key + "'"};
    return *it;
}

std::string require_string(const json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_string()) throw LineError{std::string("field '") + key + "' must be a string"};
    return v.get<std::string>();
}

Date require_date(const json& v, const std::string& key) {
    if (!v.is_string()) throw LineError{"field '" + key + "' must be a YYYY-MM-DD string"};
    auto d = Date::parse(v.get<std::string>());
    if (!d) throw LineError{"field '" + key + "' is not a valid YYYY-MM-DD date"};
    return *d;
}

double require_probability(const json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_number()) throw LineError{std::string("field '") + key + "' must be a number"};
    const double p = v.get<double>();
    if (!(p >= 0.0 && p <= 1.0)) throw LineError{std::string("field '") + key + "' outside [0,1]"};
    return p;
}

void parse_record(const std::string& line, Event& e, std::vector<MarketSnapshot>& market) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& err) {
        throw LineError{std::string("invalid JSON: ") + err.what()};
    }
    if (!obj.is_object()) throw LineError{"record is not an object"};

    e.id = require_string(obj, "id");
    if (e.id.empty()) throw LineError{"field 'id' is empty"};
    e.name = require_string(obj, "name");
    e.condition = require_string(obj, "condition");
    e.description = require_string(obj, "description");

    const auto cat = parse_category(require_string(obj, "category"));
    if (!cat) throw LineError{"unknown category"};
    e.category = *cat;

    e.created = require_date(require(obj, "created"), "created");
    e.expires = require_date(require(obj, "expires"), "expires");
    if (e.created > e.expires) throw LineError{"created is after expires"};

    const auto& resolved_at = require(obj, "resolved_at");
    const auto& resolution = require(obj, "resolution");
    if (resolved_at.is_null()) {
        e.resolved_at.reset();
    } else {
        e.resolved_at = require_date(resolved_at, "resolved_at");
    }
    if (resolution.is_null()) {
        e.resolution = Resolution::Unresolved;
    } else if (resolution == "yes") {
        e.resolution = Resolution::Yes;
    } else if (resolution == "no") {
        e.resolution = Resolution::No;
    } else {
        throw LineError{"field 'resolution' must be \"yes\", \"no\" or null"};
    }
    if ((e.resolution == Resolution::Unresolved) != !e.resolved_at.has_value())
        throw LineError{"resolution and resolved_at must be both null or both set"};
    if (e.resolved_at && (*e.resolved_at < e.created || *e.resolved_at > e.expires))
        throw LineError{"resolved_at outside [created, expires]"};

    market.clear();
    if (auto it = obj.find("market"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) throw LineError{"field 'market' must be an array"};
        const Date window_end = e.resolved_at.value_or(e.expires);
        for (const auto& m : *it) {
            if (!m.is_object()) throw LineError{"market entry is not an object"};
            MarketSnapshot s;
            s.event_id = e.id;
            s.date = require_date(require(m, "date"), "market.date");
            s.lower = require_probability(m, "lower");
            s.upper = require_probability(m, "upper");
            if (s.lower > s.upper) throw LineError{"market lower exceeds upper on " + s.date.iso()};
            if (s.date < e.created || s.date > window_end)
                throw LineError{"market snapshot " + s.date.iso() + " outside the event window"};
            market.push_back(std::move(s));
        }
    }
}

}  // namespace

DatasetSplit parse_dataset(std::istream& in, DatasetFormat format, SplitLabel label) {
    (void)format;  // JsonLines is the only format
    DatasetSplit split;
    split.label = std::move(label);
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    std::vector<MarketSnapshot> market;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Event e;
        try {
            parse_record(line, e, market);
        } catch (const LineError& err) {
            throw MalformedRecord(line_no, err.reason);
        }
        if (!ids.insert(e.id).second) throw DuplicateId(e.id);
        split.events.push_back(std::move(e));
        split.snapshots.insert(split.snapshots.end(), market.begin(), market.end());
    }
    return split;
}

DatasetSplit load_dataset(const std::string& path, SplitLabel label) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open dataset '" + path + "'");
    return parse_dataset(in, DatasetFormat::JsonLines, std::move(label));
}

std::string serialize_event(const Event& e, const std::vector<MarketSnapshot>& market) {
    ordered_json obj;
    obj["id"] = e.id;
    obj["name"] = e.name;
    obj["condition"] = e.condition;
    obj["description"] = e.description;
    obj["category"] = std::string(to_string(e.category));
    obj["created"] = e.created.iso();
    obj["expires"] = e.expires.iso();
    obj["resolved_at"] = e.resolved_at ? ordered_json(e.resolved_at->iso()) : ordered_json(nullptr);
    switch (e.resolution) {
        case Resolution::Yes: obj["resolution"] = "yes"; break;
        case Resolution::No: obj["resolution"] = "no"; break;
        case Resolution::Unresolved: obj["resolution"] = nullptr; break;
    }
    if (!market.empty()) {
        auto arr = ordered_json::array();
        for (const auto& s : market) {
            ordered_json m;
            m["date"] = s.date.iso();
            m["lower"] = s.lower;
            m["upper"] = s.upper;
            arr.push_back(std::move(m));
        }
        obj["market"] = std::move(arr);
    }
    return obj.dump();
}

std::string serialize_dataset(const DatasetSplit& split) {
    std::string out;
    for (const auto& e : split.events) {
        std::vector<MarketSnapshot> market;
        for (const auto& s : split.snapshots)
            if (s.event_id == e.id) market.push_back(s);
        out += serialize_event(e, market);
        out += '\n';
    }
    return out;
}

std::vector<Event> active_events(const DatasetSplit& split, Date on) {
    std::vector<Event> out;
    for (const auto& e : split.events) {
        const bool started = e.created <= on;
        const bool open = !e.resolved_at || *e.resolved_at > on;
        if (started && open && e.expires > on) out.push_back(e);
    }
    return out;
}

double market_point_prediction(const MarketSnapshot& s) { return (s.lower + s.upper) / 2.0; }

int outcome_indicator(const Event& e) {
    switch (e.resolution) {
        case Resolution::Yes: return 1;
        case Resolution::No: return 0;
        case Resolution::Unresolved: break;
    }
    throw UnresolvedEvent(e.id);
}

}  // namespace foresight
