// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "foresight/error.hpp"

#ifndef FORESIGHT_DEFAULT_TEMPLATE_DIR
#define FORESIGHT_DEFAULT_TEMPLATE_DIR "templates"
#endif

namespace foresight {

// ---- rendering --------------------------------------------------------------

std::string render(const PromptTemplate& tpl, const Bindings& bindings) {
    const std::string& body = tpl.body;
    std::string out;
    out.reserve(body.size() * 2);
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '[') {
            const auto close = body.find(']', i + 1);
            if (close != std::string::npos) {
                const std::string_view name(body.data() + i + 1, close - i - 1);
                if (std::find(tpl.placeholders.begin(), tpl.placeholders.end(), name) != tpl.placeholders.end()) {
                    auto it = bindings.find(name);
                    if (it == bindings.end()) throw UnboundPlaceholder(std::string(name));
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += body[i++];
    }
    return out;
}

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw TemplateError("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

AnswerScale parse_scale(const std::string& s, const std::string& id) {
    if (s == "percent") return AnswerScale::Percent;
    if (s == "unit") return AnswerScale::Unit;
    if (s == "none") return AnswerScale::None;
    throw TemplateError(id + ": unknown answer_scale '" + s + "'");
}

constexpr std::string_view kForecasterTextId = "common/forecaster_text";

}  // namespace

TemplateRegistry TemplateRegistry::load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw TemplateError("template directory not found: " + dir.string());
    TemplateRegistry reg;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        auto rel = std::filesystem::relative(entry.path(), dir);
        rel.replace_extension();
        PromptTemplate tpl;
        tpl.id = rel.generic_string();
        tpl.body = read_file(entry.path());
        if (!tpl.body.empty() && tpl.body.back() == '\n') tpl.body.pop_back();

        auto sidecar = entry.path();
        sidecar.replace_extension(".json");
        if (!std::filesystem::exists(sidecar)) throw TemplateError(tpl.id + ": missing metadata sidecar");
        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(read_file(sidecar));
            tpl.placeholders = meta.at("placeholders").get<std::vector<std::string>>();
            tpl.answer_scale = parse_scale(meta.value("answer_scale", std::string("none")), tpl.id);
        } catch (const nlohmann::json::exception& e) {
            throw TemplateError(tpl.id + ": bad metadata: " + e.what());
        }
        for (const auto& p : tpl.placeholders)
            if (tpl.body.find("[" + p + "]") == std::string::npos)
                throw TemplateError(tpl.id + ": declared placeholder [" + p + "] does not occur in the body");
        reg.templates_.emplace(tpl.id, std::move(tpl));
    }
    if (auto it = reg.templates_.find(kForecasterTextId); it != reg.templates_.end())
        reg.shared_.emplace("Forecaster Text", it->second.body);
    return reg;
}

std::filesystem::path TemplateRegistry::default_dir() {
    if (const char* env = std::getenv("FORESIGHT_TEMPLATE_DIR"); env && *env) return env;
    return FORESIGHT_DEFAULT_TEMPLATE_DIR;
}

const PromptTemplate& TemplateRegistry::get(std::string_view id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw TemplateError("unknown template '" + std::string(id) + "'");
    return it->second;
}

bool TemplateRegistry::contains(std::string_view id) const { return templates_.find(id) != templates_.end(); }

std::vector<std::string> TemplateRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, tpl] : templates_) out.push_back(id);
    return out;
}

std::string TemplateRegistry::render(std::string_view id, const Bindings& bindings) const {
    Bindings all = shared_;
    for (const auto& [k, v] : bindings) all[k] = v;
    return foresight::render(get(id), all);
}

// ---- dates and context ------------------------------------------------------

std::int64_t days_remaining(Date today, Date expiry) {
    if (today > expiry) throw NegativeWindow(today.iso(), expiry.iso());
    return days_between(today, expiry);
}

RenderContext::RenderContext(Event event, Date today, Bindings extra)
    : event_(std::move(event)), today_(today), extra_(std::move(extra)) {
    if (!(today_ < event_.expires))
        throw PreconditionError("prediction date " + today_.iso() + " is not before expiry " + event_.expires.iso() +
                                " of '" + event_.id + "'");
}

Bindings RenderContext::bindings() const {
    Bindings b{
        {"name", event_.name},
        {"condition", event_.condition},
        {"expiry", event_.expires.iso()},
        {"today", today_.iso()},
        {"number of days", std::to_string(days_remaining(today_, event_.expires))},
        {"description", event_.description},
    };
    for (const auto& [k, v] : extra_) b[k] = v;
    return b;
}

std::string render(const PromptTemplate& tpl, const RenderContext& ctx) { return render(tpl, ctx.bindings()); }

// ---- probability parsing ----------------------------------------------------

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view word) {
    if (pos + word.size() > text.size()) return false;
    for (std::size_t k = 0; k < word.size(); ++k)
        if (std::tolower(static_cast<unsigned char>(text[pos + k])) != word[k]) return false;
    return true;
}

}  // namespace

std::optional<double> try_parse_probability(std::string_view text, AnswerScale scale) {
    std::optional<double> last;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const bool starts_number = is_digit(text[i]) || (text[i] == '.' && i + 1 < n && is_digit(text[i + 1]));
        if (!starts_number) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        std::size_t end = i;
        while (end < n && (is_digit(text[end]) || text[end] == '.' || text[end] == ',')) ++end;
        i = end;
        // sentence punctuation is not part of the number
        while (end > start && (text[end - 1] == '.' || text[end - 1] == ',')) --end;
        const std::string_view token = text.substr(start, end - start);
        if (token.empty() || token.find(',') != std::string_view::npos) continue;
        if (std::count(token.begin(), token.end(), '.') > 1) continue;

        if (start > 0) {
            const char prev = text[start - 1];
            if (is_alpha(prev) || prev == '_' || prev == '-' || prev == '/' || prev == '+') continue;
            if (prev == ':' && start > 1 && is_digit(text[start - 2])) continue;  // 10:30
        }

        bool percent = false;
        if (end < n) {
            const char next = text[end];
            if (next == '%') {
                percent = true;
            } else if (starts_with_ci(text, end, "percent") || starts_with_ci(text, end, " percent")) {
                percent = true;
            } else if (is_alpha(next) || next == '_') {
                continue;
            } else if ((next == '-' || next == '/' || next == ':') && end + 1 < n && is_digit(text[end + 1])) {
                continue;  // date, time or range component
            }
        }

        const double value = std::stod(std::string(token));
        if (percent) {
            if (value <= 100.0) last = value / 100.0;
        } else if (value <= 1.0) {
            last = value;
        } else if (scale == AnswerScale::Percent && value <= 100.0) {
            last = value / 100.0;
        }
    }
    return last;
}

double parse_probability(std::string_view text, AnswerScale scale) {
    if (auto p = try_parse_probability(text, scale)) return *p;
    throw NoProbabilityFound(std::string(text));
}

Extraction extract_probability(llm::CompletionBackend& extractor, const TemplateRegistry& templates,
                               const std::string& raw_output, AnswerScale scale) {
    llm::CompletionRequest req;
    req.prompt = templates.render("extraction/extract", {{"output", raw_output}});
    req.n_samples = 1;
    const auto resp = llm::complete(extractor, req);

    Extraction out;
    out.extractor_reply = resp.texts.front();
    if (auto p = try_parse_probability(out.extractor_reply, AnswerScale::Unit)) {
        out.probability = *p;
        return out;
    }
    if (auto p = try_parse_probability(raw_output, scale)) {
        out.probability = *p;
        out.used_fallback = true;
        return out;
    }
    throw ExtractionFailed(raw_output);
}

double aggregate_probabilities(std::span<const double> values) {
    if (values.empty()) throw EmptyInput("aggregate_probabilities");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace foresight
