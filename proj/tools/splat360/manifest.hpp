// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace splat360::cli {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const fs::path& path);

/// Files produced by one command. Everything written through it is removed
/// again unless commit() succeeds.
class OutputSet {
public:
    explicit OutputSet(fs::path dir);
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;
    ~OutputSet();

    const fs::path& dir() const { return dir_; }
    fs::path path(const std::string& name) const { return dir_ / name; }

    void write(const std::string& name, const std::string& bytes);
    /// Keeps a file even if the command fails later.
    void retain(const std::string& name);

    /// Writes the manifest (command, config, inputs, outputs) and keeps every file.
    void commit(const std::string& manifest_name, nlohmann::ordered_json manifest);

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
    std::vector<std::string> retained_;
    bool created_dir_ = false;
    bool committed_ = false;
};

/// Manifest skeleton: tool, version, command, seed. Inputs are hashed in order.
nlohmann::ordered_json make_manifest(const std::string& command, std::uint64_t seed,
                                     nlohmann::ordered_json config,
                                     const std::vector<fs::path>& inputs);

} // namespace splat360::cli
