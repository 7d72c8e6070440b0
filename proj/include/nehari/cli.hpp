#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nehari/config.hpp"
#include "nehari/io.hpp"

namespace nehari::cli {

/// Process exit codes.
enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kUserError = 2 };

struct Invocation {
  std::string command;
  std::filesystem::path config_path;
  std::filesystem::path out_dir = "nehari_out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

/// Files written by one command, relative to the output directory.
struct CommandResult {
  Json summary;
  std::vector<std::string> files;
  bool pass = true;
};

CommandResult cmd_constants(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_project(const RunConfig& cfg, const std::filesystem::path& config_dir, const std::filesystem::path& out);
CommandResult cmd_solve(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_bubble_scan(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_curves(const RunConfig& cfg, const std::filesystem::path& out);

/// Re-hashes every file listed in the manifest; an empty list means all match.
[[nodiscard]] std::vector<std::string> verify_manifest(const std::filesystem::path& out,
                                                       const std::optional<std::string>& config_hash);

/// Runs a parsed invocation and maps exceptions onto exit codes.
int execute(const Invocation& inv, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nehari::cli
