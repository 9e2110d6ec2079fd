// SPDX-License-Identifier: Apache-2.0
#include "manifest.hpp"

#include <algorithm>
#include <array>
#include <memory>

#include <openssl/evp.h>

#include "splat360/error.hpp"
#include "splat360/io.hpp"
#include "splat360/version.hpp"

namespace splat360::cli {

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw Error("sha256: digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const fs::path& path) {
    return sha256_hex(read_text(path));
}

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) dir_ = ".";
    std::error_code ec;
    if (!fs::exists(dir_, ec)) {
        if (!fs::create_directories(dir_, ec) || ec) {
            throw ArgumentError("cannot create output directory '" + dir_.string() + "'");
        }
        created_dir_ = true;
    } else if (!fs::is_directory(dir_, ec)) {
        throw ArgumentError("output path '" + dir_.string() + "' is not a directory");
    }
}

OutputSet::~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& [name, hash] : files_) {
        if (std::find(retained_.begin(), retained_.end(), name) == retained_.end()) fs::remove(dir_ / name, ec);
    }
    if (created_dir_ && retained_.empty()) fs::remove(dir_, ec);
}

void OutputSet::write(const std::string& name, const std::string& bytes) {
    write_file_atomic(dir_ / name, bytes);
    auto it = std::find_if(files_.begin(), files_.end(), [&](const auto& f) { return f.first == name; });
    if (it != files_.end()) {
        it->second = sha256_hex(bytes);
    } else {
        files_.emplace_back(name, sha256_hex(bytes));
    }
}

void OutputSet::retain(const std::string& name) { retained_.push_back(name); }

void OutputSet::commit(const std::string& manifest_name, nlohmann::ordered_json manifest) {
    auto outputs = nlohmann::ordered_json::array();
    for (const auto& [name, hash] : files_) outputs.push_back({{"file", name}, {"sha256", hash}});
    manifest["outputs"] = std::move(outputs);
    write_file_atomic(dir_ / manifest_name, manifest.dump(2) + "\n");
    committed_ = true;
}

nlohmann::ordered_json make_manifest(const std::string& command, std::uint64_t seed,
                                     nlohmann::ordered_json config,
                                     const std::vector<fs::path>& inputs) {
    nlohmann::ordered_json m;
    m["tool"] = "splat360";
    m["version"] = kVersion;
    m["command"] = command;
    m["seed"] = seed;
    m["config"] = std::move(config);
    auto in = nlohmann::ordered_json::array();
    for (const auto& p : inputs) in.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)}});
    m["inputs"] = std::move(in);
    return m;
}

} // namespace splat360::cli
