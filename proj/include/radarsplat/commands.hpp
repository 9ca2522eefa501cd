#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "radarsplat/run_config.hpp"

namespace radarsplat::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 2, kRuntimeError = 3 };

/// Where a command's settings come from: an optional config file followed by
/// `key = value` overrides applied in order.
struct Invocation {
  std::optional<std::filesystem::path> config_file;
  std::vector<std::pair<std::string, std::string>> overrides;
};

/// Subcommand names accepted by run_command.
const std::vector<std::string>& command_names();

/// Resolves the configuration, runs `command` and writes
/// `<output_dir>/<command>_manifest.json`, also when a stage fails. Progress
/// goes to `log`, errors to `err`. Returns an ExitCode.
int run_command(const std::string& command, const Invocation& invocation,
                std::ostream& log, std::ostream& err);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace radarsplat::cli
