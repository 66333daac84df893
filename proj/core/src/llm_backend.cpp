// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/error.hpp"
#include "foresight/llm/backend.hpp"

namespace foresight::llm {

void CompletionRequest::validate() const {
    if (n_samples < 1) throw InvalidRequest("n_samples must be >= 1");
    if (max_tokens < 1) throw InvalidRequest("max_tokens must be >= 1");
    if (!(temperature >= 0.0)) throw InvalidRequest("temperature must be >= 0");
}

CompletionResponse complete(CompletionBackend& backend, const CompletionRequest& req) {
    req.validate();
    auto resp = backend.complete(req);
    if (resp.texts.size() != static_cast<std::size_t>(req.n_samples))
        throw ProviderError(0, "backend '" + backend.id() + "' returned " + std::to_string(resp.texts.size()) +
                                   " texts for n_samples=" + std::to_string(req.n_samples));
    return resp;
}

}  // namespace foresight::llm
