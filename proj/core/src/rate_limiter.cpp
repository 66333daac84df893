// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/llm/rate_limiter.hpp"

#include <algorithm>
#include <thread>

namespace foresight::llm {

RateLimiter::RateLimiter(double requests_per_second, double burst)
    : rate_(requests_per_second), capacity_(std::max(1.0, burst)), tokens_(capacity_), last_(Clock::now()) {}

RateLimiter::Clock::duration RateLimiter::reserve() {
    if (rate_ <= 0.0) return Clock::duration::zero();
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
    tokens_ -= 1.0;  // may go negative: that debt is the wait
    if (tokens_ >= 0.0) return Clock::duration::zero();
    return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(-tokens_ / rate_));
}

void RateLimiter::acquire() {
    const auto wait = reserve();
    if (wait > Clock::duration::zero()) std::this_thread::sleep_for(wait);
}

}  // namespace foresight::llm
