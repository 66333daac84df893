// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace foresight {

/// Base class of every error raised by the library. `kind()` is a stable
/// machine-readable tag ("MalformedRecord", "ReplayMiss", ...).
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

  private:
    std::string kind_;
};

// ---- events -----------------------------------------------------------------

class MalformedRecord : public Error {
  public:
    MalformedRecord(std::size_t line, const std::string& reason)
        : Error("MalformedRecord", "line " + std::to_string(line) + ": " + reason),
          line_(line),
          reason_(reason) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

  private:
    std::size_t line_;
    std::string reason_;
};

class DuplicateId : public Error {
  public:
    explicit DuplicateId(const std::string& id) : Error("DuplicateId", "duplicate event id '" + id + "'"), id_(id) {}
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

  private:
    std::string id_;
};

class UnresolvedEvent : public Error {
  public:
    explicit UnresolvedEvent(const std::string& id)
        : Error("UnresolvedEvent", "event '" + id + "' is unresolved"), id_(id) {}
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

  private:
    std::string id_;
};

class UnknownEvent : public Error {
  public:
    explicit UnknownEvent(const std::string& id) : Error("UnknownEvent", "unknown event '" + id + "'"), id_(id) {}
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

  private:
    std::string id_;
};

// ---- metrics ----------------------------------------------------------------

class EmptyInput : public Error {
  public:
    explicit EmptyInput(const std::string& what) : Error("EmptyInput", what + ": empty input") {}
};

class EmptyClass : public Error {
  public:
    explicit EmptyClass(const std::string& which)
        : Error("EmptyClass", "weighted brier: no '" + which + "' events"), which_(which) {}
    [[nodiscard]] const std::string& which() const noexcept { return which_; }

  private:
    std::string which_;
};

class MismatchedEventSets : public Error {
  public:
    explicit MismatchedEventSets(std::vector<std::string> missing)
        : Error("MismatchedEventSets", "event sets differ; unmatched: " + join(missing)), missing_(std::move(missing)) {}
    [[nodiscard]] const std::vector<std::string>& missing_ids() const noexcept { return missing_; }

  private:
    static std::string join(const std::vector<std::string>& ids) {
        std::string out;
        for (const auto& id : ids) {
            if (!out.empty()) out += ", ";
            out += id;
        }
        return out;
    }

    std::vector<std::string> missing_;
};

class MissingSnapshot : public Error {
  public:
    MissingSnapshot(const std::string& id, const std::string& date)
        : Error("MissingSnapshot", "no market snapshot for '" + id + "' on " + date) {}
};

class InvalidForecast : public Error {
  public:
    explicit InvalidForecast(const std::string& message) : Error("InvalidForecast", message) {}
};

// ---- llm --------------------------------------------------------------------

class InvalidRequest : public Error {
  public:
    explicit InvalidRequest(const std::string& message) : Error("InvalidRequest", message) {}
};

class BackendUnavailable : public Error {
  public:
    explicit BackendUnavailable(const std::string& message) : Error("BackendUnavailable", message) {}
};

class RateLimited : public Error {
  public:
    explicit RateLimited(double retry_after_seconds)
        : Error("RateLimited", "rate limited; retry after " + std::to_string(retry_after_seconds) + "s"),
          retry_after_(retry_after_seconds) {}
    [[nodiscard]] double retry_after() const noexcept { return retry_after_; }

  private:
    double retry_after_;
};

class ProviderError : public Error {
  public:
    ProviderError(int status, std::string body)
        : Error("ProviderError", "provider returned HTTP " + std::to_string(status) + ": " + body),
          status_(status),
          body_(std::move(body)) {}
    [[nodiscard]] int status() const noexcept { return status_; }
    [[nodiscard]] const std::string& body() const noexcept { return body_; }

  private:
    int status_;
    std::string body_;
};

class ReplayMiss : public Error {
  public:
    explicit ReplayMiss(const std::string& digest)
        : Error("ReplayMiss", "replay-only cache has no entry " + digest), digest_(digest) {}
    [[nodiscard]] const std::string& digest() const noexcept { return digest_; }

  private:
    std::string digest_;
};

class CacheCorrupt : public Error {
  public:
    explicit CacheCorrupt(const std::string& path) : Error("CacheCorrupt", "corrupt cache entry " + path) {}
};

// ---- prompts ----------------------------------------------------------------

class NegativeWindow : public Error {
  public:
    NegativeWindow(const std::string& today, const std::string& expiry)
        : Error("NegativeWindow", "prediction date " + today + " is after expiry " + expiry) {}
};

class UnboundPlaceholder : public Error {
  public:
    explicit UnboundPlaceholder(const std::string& name)
        : Error("UnboundPlaceholder", "no binding for placeholder [" + name + "]"), name_(name) {}
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

  private:
    std::string name_;
};

class TemplateError : public Error {
  public:
    explicit TemplateError(const std::string& message) : Error("TemplateError", message) {}
};

class NoProbabilityFound : public Error {
  public:
    explicit NoProbabilityFound(const std::string& text)
        : Error("NoProbabilityFound", "no probability in: " + text.substr(0, 200)) {}
};

class ExtractionFailed : public Error {
  public:
    explicit ExtractionFailed(const std::string& raw)
        : Error("ExtractionFailed", "could not extract a probability from: " + raw.substr(0, 200)) {}
};

// ---- strategies -------------------------------------------------------------

class PreconditionError : public Error {
  public:
    explicit PreconditionError(const std::string& message) : Error("PreconditionError", message) {}
};

class StepParseError : public Error {
  public:
    StepParseError(const std::string& step, const std::string& reason)
        : Error("StepParseError", "step '" + step + "': " + reason) {}
};

// ---- news -------------------------------------------------------------------

class NetworkError : public Error {
  public:
    explicit NetworkError(const std::string& message) : Error("NetworkError", message) {}
};

class UpstreamError : public Error {
  public:
    explicit UpstreamError(int status)
        : Error("UpstreamError", "upstream returned HTTP " + std::to_string(status)), status_(status) {}
    [[nodiscard]] int status() const noexcept { return status_; }

  private:
    int status_;
};

class MissingApiKey : public Error {
  public:
    explicit MissingApiKey(const std::string& variable)
        : Error("MissingApiKey", "API key not set (" + variable + ")") {}
};

// ---- cli --------------------------------------------------------------------

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& message) : Error("ConfigError", message) {}
};

}  // namespace foresight
