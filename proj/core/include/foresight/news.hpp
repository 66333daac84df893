// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "foresight/content_store.hpp"
#include "foresight/date.hpp"

namespace foresight::news {

enum class Source { HackerNews, NYT };

std::string_view to_string(Source s) noexcept;

struct Headline {
    Source source = Source::HackerNews;
    Date date;
    std::string title;
    std::optional<std::string> url;

    friend bool operator==(const Headline&, const Headline&) = default;
};

nlohmann::json to_json(const Headline& h);
Headline headline_from_json(const nlohmann::json& j);

struct QueryWindow {
    std::vector<std::string> terms;
    Date until;
    int max_results = 25;

    /// Throws PreconditionError on empty terms, an empty term or max_results < 1.
    void validate() const;

    /// Terms joined by single spaces, the query string sent upstream.
    [[nodiscard]] std::string query_string() const;
};

/// Drops headlines dated after `q.until` or with empty titles, removes
/// (title, date) duplicates, sorts newest first (ties keep input order) and
/// truncates to `q.max_results`.
std::vector<Headline> bound_and_normalize(std::vector<Headline> headlines, const QueryWindow& q);

/// `Headline <i> -- <YYYY-MM-DD>: <title>`, one per line, 1-indexed. Empty
/// input gives an empty string.
std::string format_headlines(const std::vector<Headline>& headlines);

/// Inverse of format_headlines. Lines that do not match are skipped.
std::vector<Headline> parse_headlines(std::string_view text, Source source);

/// A searchable headline archive. Implementations must tolerate concurrent queries.
class HeadlineClient {
  public:
    virtual ~HeadlineClient() = default;
    [[nodiscard]] virtual Source source() const = 0;
    virtual std::vector<Headline> query(const QueryWindow& q) = 0;
};

struct HttpOptions {
    std::string base_url;
    std::chrono::milliseconds timeout{10'000};
    int retries = 2;
    std::chrono::milliseconds initial_backoff{500};  // doubled per retry
};

/// Algolia-style Hacker News search (`/api/v1/search_by_date`).
class HackerNewsClient final : public HeadlineClient {
  public:
    static constexpr std::string_view kDefaultBaseUrl = "https://hn.algolia.com";

    explicit HackerNewsClient(HttpOptions options = {});

    [[nodiscard]] Source source() const override { return Source::HackerNews; }
    std::vector<Headline> query(const QueryWindow& q) override;

    [[nodiscard]] std::size_t network_calls() const noexcept { return calls_.load(); }

  private:
    HttpOptions options_;
    std::atomic<std::size_t> calls_{0};
};

/// NYT article search (`/svc/search/v2/articlesearch.json`). The key comes
/// from the constructor or, when empty, from FORESIGHT_NYT_API_KEY at query time.
class NytClient final : public HeadlineClient {
  public:
    static constexpr std::string_view kDefaultBaseUrl = "https://api.nytimes.com";
    static constexpr int kPageSize = 10;
    static constexpr int kMaxPages = 10;

    explicit NytClient(HttpOptions options = {}, std::string api_key = {});

    [[nodiscard]] Source source() const override { return Source::NYT; }
    std::vector<Headline> query(const QueryWindow& q) override;

    [[nodiscard]] std::size_t network_calls() const noexcept { return calls_.load(); }

  private:
    HttpOptions options_;
    std::string api_key_;
    std::atomic<std::size_t> calls_{0};
};

std::vector<Headline> query_hackernews(HackerNewsClient& client, const QueryWindow& q);
std::vector<Headline> query_nyt(NytClient& client, const QueryWindow& q);

/// Content-addressed response cache keyed by (source, terms, until, max_results).
/// In replay-only mode a miss throws ReplayMiss and the inner client is never used.
class CachingHeadlineClient final : public HeadlineClient {
  public:
    CachingHeadlineClient(HeadlineClient& inner, std::filesystem::path cache_dir, bool replay_only = false);

    [[nodiscard]] Source source() const override { return inner_.source(); }
    std::vector<Headline> query(const QueryWindow& q) override;

    [[nodiscard]] static std::string cache_digest(Source source, const QueryWindow& q);

  private:
    HeadlineClient& inner_;
    ContentStore store_;
    bool replay_only_;
};

}  // namespace foresight::news
