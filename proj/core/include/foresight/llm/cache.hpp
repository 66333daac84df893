// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "foresight/content_store.hpp"
#include "foresight/llm/backend.hpp"

namespace foresight::llm {

struct CacheKey {
    std::string digest;  // 64 lowercase hex chars

    friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

/// Canonical JSON text of a request: keys sorted, no whitespace. Independent
/// of the order fields appeared in any source document.
std::string canonical_request(const CompletionRequest& req);

/// Parses a serialized request (any field order; missing fields take defaults).
CompletionRequest request_from_json(const std::string& text);

CacheKey cache_key(const std::string& backend_id, const CompletionRequest& req);

enum class CacheMode {
    ReadWrite,   // hit -> stored reply, miss -> call backend and persist
    ReplayOnly,  // miss -> ReplayMiss, the backend is never called
};

/// Record/replay wrapper around another backend. Entries live at
/// `<cache_dir>/<first 2 hex>/<digest>.json` and hold the request, the reply
/// texts and a timestamp. Concurrent misses on the same key are serialized so
/// the backend is called once per key.
class CachingBackend final : public CompletionBackend {
  public:
    CachingBackend(CompletionBackend& inner, std::filesystem::path cache_dir, CacheMode mode = CacheMode::ReadWrite);

    [[nodiscard]] std::string id() const override { return inner_.id(); }
    CompletionResponse complete(const CompletionRequest& req) override;

    [[nodiscard]] CacheMode mode() const noexcept { return mode_; }

  private:
    std::shared_ptr<std::mutex> key_mutex(const std::string& digest);
    std::optional<CompletionResponse> load(const std::string& digest, const CompletionRequest& req) const;

    CompletionBackend& inner_;
    ContentStore store_;
    CacheMode mode_;
    std::mutex map_mutex_;
    std::unordered_map<std::string, std::shared_ptr<std::mutex>> key_mutexes_;
};

/// One-shot form of CachingBackend::complete.
CompletionResponse cached_complete(const std::filesystem::path& cache_dir, CompletionBackend& backend,
                                   const CompletionRequest& req, CacheMode mode = CacheMode::ReadWrite);

}  // namespace foresight::llm
