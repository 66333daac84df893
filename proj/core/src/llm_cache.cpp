// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/llm/cache.hpp"

#include <chrono>
#include <nlohmann/json.hpp>

#include "foresight/error.hpp"

namespace foresight::llm {

using nlohmann::json;

namespace {

json request_json(const CompletionRequest& req) {
    json j;
    j["prompt"] = req.prompt;
    j["temperature"] = req.temperature;
    j["n_samples"] = req.n_samples;
    j["max_tokens"] = req.max_tokens;
    j["stop"] = req.stop ? json(*req.stop) : json(nullptr);
    return j;
}

}  // namespace

std::string canonical_request(const CompletionRequest& req) { return request_json(req).dump(); }

CompletionRequest request_from_json(const std::string& text) {
    const json j = json::parse(text);
    CompletionRequest req;
    req.prompt = j.at("prompt").get<std::string>();
    req.temperature = j.value("temperature", kDefaultTemperature);
    req.n_samples = j.value("n_samples", kDefaultSamples);
    req.max_tokens = j.value("max_tokens", kDefaultMaxTokens);
    if (auto it = j.find("stop"); it != j.end() && !it->is_null()) req.stop = it->get<std::vector<std::string>>();
    return req;
}

CacheKey cache_key(const std::string& backend_id, const CompletionRequest& req) {
    json j;
    j["backend_id"] = backend_id;
    j["request"] = request_json(req);
    return CacheKey{sha256_hex(j.dump())};
}

CachingBackend::CachingBackend(CompletionBackend& inner, std::filesystem::path cache_dir, CacheMode mode)
    : inner_(inner), store_(std::move(cache_dir)), mode_(mode) {}

std::shared_ptr<std::mutex> CachingBackend::key_mutex(const std::string& digest) {
    std::lock_guard lock(map_mutex_);
    auto& m = key_mutexes_[digest];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
}

std::optional<CompletionResponse> CachingBackend::load(const std::string& digest, const CompletionRequest& req) const {
    auto text = store_.read(digest);
    if (!text) return std::nullopt;
    const auto path = store_.path_for(digest).string();
    try {
        const json entry = json::parse(*text);
        CompletionResponse resp;
        resp.texts = entry.at("response").at("texts").get<std::vector<std::string>>();
        resp.backend_id = entry.at("backend_id").get<std::string>();
        resp.cached = true;
        if (resp.texts.size() != static_cast<std::size_t>(req.n_samples)) throw CacheCorrupt(path);
        return resp;
    } catch (const json::exception&) {
        throw CacheCorrupt(path);
    }
}

CompletionResponse CachingBackend::complete(const CompletionRequest& req) {
    const std::string backend_id = inner_.id();
    const auto key = cache_key(backend_id, req);

    if (auto hit = load(key.digest, req)) return *hit;
    if (mode_ == CacheMode::ReplayOnly) throw ReplayMiss(key.digest);

    auto mutex = key_mutex(key.digest);
    std::lock_guard lock(*mutex);
    if (auto hit = load(key.digest, req)) return *hit;  // filled while we waited

    auto resp = inner_.complete(req);
    json entry;
    entry["backend_id"] = backend_id;
    entry["request"] = request_json(req);
    entry["response"] = {{"texts", resp.texts}};
    entry["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
    store_.write(key.digest, entry.dump(2));
    resp.cached = false;
    return resp;
}

CompletionResponse cached_complete(const std::filesystem::path& cache_dir, CompletionBackend& backend,
                                   const CompletionRequest& req, CacheMode mode) {
    CachingBackend cache(backend, cache_dir, mode);
    return complete(cache, req);
}

}  // namespace foresight::llm
