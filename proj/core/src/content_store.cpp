// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/content_store.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "foresight/error.hpp"

namespace foresight {

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw Error("CryptoError", "SHA-256 failed");

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

ContentStore::ContentStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path ContentStore::path_for(const std::string& digest) const {
    return root_ / digest.substr(0, 2) / (digest + ".json");
}

std::optional<std::string> ContentStore::read(const std::string& digest) const {
    std::ifstream in(path_for(digest), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void ContentStore::write(const std::string& digest, const std::string& content) const {
    static std::atomic<std::uint64_t> counter{0};
    const auto final_path = path_for(digest);
    std::filesystem::create_directories(final_path.parent_path());

    std::ostringstream tmp_name;
    tmp_name << final_path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id())
             << '.' << counter.fetch_add(1);
    const auto tmp_path = final_path.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("IoError", "cannot write cache file " + tmp_path.string());
        out << content;
        if (!out.flush()) throw Error("IoError", "cannot write cache file " + tmp_path.string());
    }
    std::filesystem::rename(tmp_path, final_path);
}

}  // namespace foresight
