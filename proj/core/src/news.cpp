// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/news.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "foresight/error.hpp"
#include "http_util.hpp"

namespace foresight::news {

using nlohmann::json;

std::string_view to_string(Source s) noexcept { return s == Source::HackerNews ? "hackernews" : "nyt"; }

namespace {

Source parse_source(const std::string& s) {
    if (s == "hackernews") return Source::HackerNews;
    if (s == "nyt") return Source::NYT;
    throw std::invalid_argument("unknown headline source '" + s + "'");
}

}  // namespace

json to_json(const Headline& h) {
    json j;
    j["source"] = std::string(to_string(h.source));
    j["date"] = h.date.iso();
    j["title"] = h.title;
    if (h.url) j["url"] = *h.url;
    return j;
}

Headline headline_from_json(const json& j) {
    Headline h;
    h.source = parse_source(j.at("source").get<std::string>());
    h.date = Date::from_iso(j.at("date").get<std::string>());
    h.title = j.at("title").get<std::string>();
    if (auto it = j.find("url"); it != j.end() && it->is_string()) h.url = it->get<std::string>();
    return h;
}

void QueryWindow::validate() const {
    if (terms.empty()) throw PreconditionError("query has no search terms");
    for (const auto& t : terms)
        if (t.empty()) throw PreconditionError("query has an empty search term");
    if (max_results < 1) throw PreconditionError("max_results must be positive");
}

std::string QueryWindow::query_string() const {
    std::string out;
    for (const auto& t : terms) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::vector<Headline> bound_and_normalize(std::vector<Headline> headlines, const QueryWindow& q) {
    std::vector<Headline> kept;
    std::set<std::pair<std::string, std::int64_t>> seen;
    for (auto& h : headlines) {
        if (h.date > q.until || h.title.empty()) continue;
        if (!seen.emplace(h.title, h.date.day_number()).second) continue;
        kept.push_back(std::move(h));
    }
    std::stable_sort(kept.begin(), kept.end(), [](const Headline& a, const Headline& b) { return a.date > b.date; });
    if (kept.size() > static_cast<std::size_t>(q.max_results)) kept.resize(static_cast<std::size_t>(q.max_results));
    return kept;
}

std::string format_headlines(const std::vector<Headline>& headlines) {
    std::string out;
    for (std::size_t i = 0; i < headlines.size(); ++i) {
        if (i > 0) out += '\n';
        out += "Headline " + std::to_string(i + 1) + " -- " + headlines[i].date.iso() + ": " + headlines[i].title;
    }
    return out;
}

std::vector<Headline> parse_headlines(std::string_view text, Source source) {
    static const std::regex line_re(R"(^Headline \d+ -- (\d{4}-\d{2}-\d{2}): (.*)$)");
    std::vector<Headline> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::smatch m;
    while (std::getline(in, line)) {
        if (!std::regex_match(line, m, line_re)) continue;
        auto date = Date::parse(m[1].str());
        if (!date) continue;
        out.push_back(Headline{source, *date, m[2].str(), std::nullopt});
    }
    return out;
}

// ---- HTTP -------------------------------------------------------------------

namespace {

/// GET with retry on transport failure and 5xx; 4xx fails at once.
std::string get_with_retry(const HttpOptions& opt, const std::string& default_base, const std::string& path_and_query,
                           std::atomic<std::size_t>& calls) {
    const auto url = detail::split_url(opt.base_url.empty() ? default_base : opt.base_url);
    const std::string target = url.path + path_and_query;
    auto backoff = opt.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        calls.fetch_add(1);
        httplib::Client client(url.origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opt.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opt.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        auto res = client.Get(target);
        const bool last = attempt >= opt.retries;
        if (!res) {
            if (last) throw NetworkError(url.origin + ": " + httplib::to_string(res.error()));
        } else if (res->status >= 500) {
            if (last) throw UpstreamError(res->status);
        } else if (res->status < 200 || res->status >= 300) {
            throw UpstreamError(res->status);
        } else {
            return res->body;
        }
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error&) {
        throw UpstreamError(200);
    }
}

std::optional<Date> date_prefix(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) return std::nullopt;
    const auto s = it->get<std::string>();
    if (s.size() < 10) return std::nullopt;
    return Date::parse(std::string_view(s).substr(0, 10));
}

}  // namespace

HackerNewsClient::HackerNewsClient(HttpOptions options) : options_(std::move(options)) {}

std::vector<Headline> HackerNewsClient::query(const QueryWindow& q) {
    q.validate();
    // created_at_i < midnight after `until`
    const auto bound = q.until.plus_days(1).epoch_seconds();
    const std::string pq = "/api/v1/search_by_date?query=" + detail::url_encode(q.query_string()) +
                           "&tags=story&numericFilters=" + detail::url_encode("created_at_i<" + std::to_string(bound)) +
                           "&hitsPerPage=" + std::to_string(q.max_results);
    const json doc = parse_body(get_with_retry(options_, std::string(kDefaultBaseUrl), pq, calls_));

    std::vector<Headline> out;
    auto hits = doc.find("hits");
    if (hits == doc.end() || !hits->is_array()) return out;
    for (const auto& hit : *hits) {
        Headline h;
        h.source = Source::HackerNews;
        if (auto it = hit.find("title"); it != hit.end() && it->is_string()) h.title = it->get<std::string>();
        if (auto it = hit.find("created_at_i"); it != hit.end() && it->is_number_integer()) {
            const auto secs = it->get<std::int64_t>();
            h.date = Date(std::chrono::floor<std::chrono::days>(std::chrono::sys_seconds(std::chrono::seconds(secs))));
        } else if (auto d = date_prefix(hit, "created_at")) {
            h.date = *d;
        } else {
            continue;
        }
        if (auto it = hit.find("url"); it != hit.end() && it->is_string()) h.url = it->get<std::string>();
        out.push_back(std::move(h));
    }
    return bound_and_normalize(std::move(out), q);
}

NytClient::NytClient(HttpOptions options, std::string api_key)
    : options_(std::move(options)), api_key_(std::move(api_key)) {}

std::vector<Headline> NytClient::query(const QueryWindow& q) {
    q.validate();
    std::string key = api_key_;
    if (key.empty())
        if (const char* env = std::getenv("FORESIGHT_NYT_API_KEY")) key = env;
    if (key.empty()) throw MissingApiKey("FORESIGHT_NYT_API_KEY");

    std::string end_date = q.until.iso();
    end_date.erase(std::remove(end_date.begin(), end_date.end(), '-'), end_date.end());

    std::vector<Headline> collected;
    for (int page = 0; page < kMaxPages; ++page) {
        const std::string pq = "/svc/search/v2/articlesearch.json?q=" + detail::url_encode(q.query_string()) +
                               "&end_date=" + end_date + "&sort=newest&page=" + std::to_string(page) +
                               "&api-key=" + detail::url_encode(key);
        const json doc = parse_body(get_with_retry(options_, std::string(kDefaultBaseUrl), pq, calls_));
        const json* docs = nullptr;
        if (auto r = doc.find("response"); r != doc.end() && r->is_object())
            if (auto d = r->find("docs"); d != r->end() && d->is_array()) docs = &*d;
        if (docs == nullptr) break;

        for (const auto& item : *docs) {
            Headline h;
            h.source = Source::NYT;
            if (auto hl = item.find("headline"); hl != item.end()) {
                if (hl->is_object() && hl->contains("main") && (*hl)["main"].is_string())
                    h.title = (*hl)["main"].get<std::string>();
                else if (hl->is_string())
                    h.title = hl->get<std::string>();
            }
            auto d = date_prefix(item, "pub_date");
            if (!d) continue;
            h.date = *d;
            if (auto it = item.find("web_url"); it != item.end() && it->is_string()) h.url = it->get<std::string>();
            collected.push_back(std::move(h));
        }
        if (docs->size() < static_cast<std::size_t>(kPageSize)) break;
        if (bound_and_normalize(collected, q).size() >= static_cast<std::size_t>(q.max_results)) break;
    }
    return bound_and_normalize(std::move(collected), q);
}

std::vector<Headline> query_hackernews(HackerNewsClient& client, const QueryWindow& q) { return client.query(q); }
std::vector<Headline> query_nyt(NytClient& client, const QueryWindow& q) { return client.query(q); }

// ---- cache ------------------------------------------------------------------

CachingHeadlineClient::CachingHeadlineClient(HeadlineClient& inner, std::filesystem::path cache_dir, bool replay_only)
    : inner_(inner), store_(std::move(cache_dir)), replay_only_(replay_only) {}

std::string CachingHeadlineClient::cache_digest(Source source, const QueryWindow& q) {
    json j;
    j["source"] = std::string(to_string(source));
    j["terms"] = q.terms;
    j["until"] = q.until.iso();
    j["max_results"] = q.max_results;
    return sha256_hex(j.dump());
}

std::vector<Headline> CachingHeadlineClient::query(const QueryWindow& q) {
    q.validate();
    const auto digest = cache_digest(inner_.source(), q);
    if (auto text = store_.read(digest)) {
        try {
            const json entry = json::parse(*text);
            std::vector<Headline> out;
            for (const auto& h : entry.at("headlines")) out.push_back(headline_from_json(h));
            // a stale or hand-edited entry must not leak either
            return bound_and_normalize(std::move(out), q);
        } catch (const std::exception&) {
            throw CacheCorrupt(store_.path_for(digest).string());
        }
    }
    if (replay_only_) throw ReplayMiss(digest);

    auto result = bound_and_normalize(inner_.query(q), q);
    json entry;
    entry["source"] = std::string(to_string(inner_.source()));
    entry["terms"] = q.terms;
    entry["until"] = q.until.iso();
    entry["max_results"] = q.max_results;
    entry["headlines"] = json::array();
    for (const auto& h : result) entry["headlines"].push_back(to_json(h));
    store_.write(digest, entry.dump(2));
    return result;
}

}  // namespace foresight::news
