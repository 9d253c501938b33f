// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace kppvar::experiments {

/// Malformed configuration: missing file, bad JSON, unknown or ill-typed key.
/// The CLI maps this to exit status 2, before any artifact is written.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Built-in defaults for one command; user config and CLI overrides merge on
/// top, key by key.
nlohmann::json default_config(const std::string& command);

/// Loads a config file.  A manifest written by a previous run (an object with
/// "command" and "config" members) is accepted and unwrapped, so any run can
/// be reproduced from its manifest.
nlohmann::json load_config_file(const std::filesystem::path& path, const std::string& command);

/// Resolves defaults + config, validates every key, runs the command, and
/// writes its artifacts plus manifest.json into out_dir.  Returns the
/// manifest.  The manifest holds the fully resolved config and no volatile
/// data, so re-running from it reproduces every CSV byte for byte.
nlohmann::json run_command(const std::string& command, const nlohmann::json& config,
                           const std::filesystem::path& out_dir);

}  // namespace kppvar::experiments
