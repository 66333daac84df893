// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <mutex>

namespace foresight::llm {

/// Token bucket shared by all threads using one backend. `acquire` blocks
/// until a token is available. A non-positive rate disables limiting.
class RateLimiter {
  public:
    using Clock = std::chrono::steady_clock;

    explicit RateLimiter(double requests_per_second = 1.0, double burst = 1.0);

    void acquire();

    /// Returns how long the caller must wait before the next token; consumes
    /// the token immediately (the wait is the caller's business).
    Clock::duration reserve();

  private:
    std::mutex mutex_;
    double rate_;
    double capacity_;
    double tokens_;
    Clock::time_point last_;
};

}  // namespace foresight::llm
