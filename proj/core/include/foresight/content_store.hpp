// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace foresight {

/// Lowercase hex SHA-256 of `data` (64 characters).
std::string sha256_hex(std::string_view data);

/// Content-addressed file store: one document per digest at
/// `<root>/<first 2 hex>/<digest>.json`. Writes go to a temporary file that is
/// renamed into place, so readers never observe a partial document.
class ContentStore {
  public:
    explicit ContentStore(std::filesystem::path root);

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] std::filesystem::path path_for(const std::string& digest) const;

    [[nodiscard]] std::optional<std::string> read(const std::string& digest) const;
    void write(const std::string& digest, const std::string& content) const;

  private:
    std::filesystem::path root_;
};

}  // namespace foresight
