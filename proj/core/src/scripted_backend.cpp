// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/llm/scripted_backend.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "foresight/content_store.hpp"
#include "foresight/error.hpp"

namespace foresight::llm {

using nlohmann::json;

namespace {

// Replaces {{k}} with capture group k.
std::string expand(const std::string& tpl, const std::smatch& m) {
    std::string out;
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl.compare(i, 2, "{{") == 0) {
            const auto close = tpl.find("}}", i + 2);
            if (close != std::string::npos) {
                const auto inner = tpl.substr(i + 2, close - i - 2);
                if (!inner.empty() && inner.find_first_not_of("0123456789") == std::string::npos) {
                    const auto k = std::stoul(inner);
                    if (k < m.size()) out += m[k].str();
                    i = close + 2;
                    continue;
                }
            }
        }
        out += tpl[i++];
    }
    return out;
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::vector<MockRule> rules, std::string id) : id_(std::move(id)) {
    rules_.reserve(rules.size());
    for (auto& r : rules) {
        if (r.responses.empty() && !r.error) throw ConfigError("mock rule has neither responses nor error");
        CompiledRule c{std::move(r), std::nullopt};
        if (c.rule.match == MockRule::Match::Regex) {
            try {
                c.re.emplace(c.rule.pattern, std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                throw ConfigError("invalid mock regex '" + c.rule.pattern + "': " + e.what());
            }
        }
        rules_.push_back(std::move(c));
    }
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_json(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("mock rules are not valid JSON: ") + e.what());
    }
    const json& arr = doc.is_array() ? doc : doc.value("rules", json::array());
    if (!arr.is_array()) throw ConfigError("mock rules: 'rules' must be an array");

    std::vector<MockRule> rules;
    for (const auto& item : arr) {
        MockRule r;
        const auto match = item.value("match", std::string("any"));
        if (match == "contains" || match == "substring") {
            r.match = MockRule::Match::Substring;
        } else if (match == "regex") {
            r.match = MockRule::Match::Regex;
        } else if (match == "any" || match == "*") {
            r.match = MockRule::Match::Any;
        } else {
            throw ConfigError("mock rules: unknown match kind '" + match + "'");
        }
        r.pattern = item.value("pattern", std::string());
        if (auto it = item.find("responses"); it != item.end()) r.responses = it->get<std::vector<std::string>>();
        if (auto it = item.find("response"); it != item.end()) r.responses.push_back(it->get<std::string>());
        if (auto it = item.find("error"); it != item.end()) r.error = it->get<std::string>();
        rules.push_back(std::move(r));
    }
    std::string id = doc.is_object() && doc.contains("id") ? doc["id"].get<std::string>()
                                                           : "scripted:" + sha256_hex(doc.dump()).substr(0, 16);
    return std::make_unique<ScriptedBackend>(std::move(rules), std::move(id));
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock rules '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

CompletionResponse ScriptedBackend::complete(const CompletionRequest& req) {
    calls_.fetch_add(1);
    for (const auto& c : rules_) {
        std::smatch m;
        bool hit = false;
        switch (c.rule.match) {
            case MockRule::Match::Any: hit = true; break;
            case MockRule::Match::Substring: hit = req.prompt.find(c.rule.pattern) != std::string::npos; break;
            case MockRule::Match::Regex: hit = std::regex_search(req.prompt, m, *c.re); break;
        }
        if (!hit) continue;
        if (c.rule.error) throw BackendUnavailable(*c.rule.error);

        CompletionResponse resp;
        resp.backend_id = id_;
        resp.texts.reserve(req.n_samples);
        for (int i = 0; i < req.n_samples; ++i) {
            const auto& tpl = c.rule.responses[static_cast<std::size_t>(i) % c.rule.responses.size()];
            resp.texts.push_back(c.rule.match == MockRule::Match::Regex ? expand(tpl, m) : tpl);
        }
        return resp;
    }
    throw ProviderError(404, "no scripted rule matches prompt: " + req.prompt.substr(0, 120));
}

}  // namespace foresight::llm
