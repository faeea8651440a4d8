#pragma once

// Command dispatch for the xmem front end. Every command turns a parsed
// config into one text artifact (JSON or CSV) plus optional side files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xmem/config.hpp"

namespace xmem {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3 };

struct Artifact {
  std::string text;
  std::string extension;  // "json" or "csv"
  // Extra files (path, bytes) requested by the config: sample dumps, plot data.
  std::vector<std::pair<std::string, std::string>> extras;
};

/// Runs a validated config. Throws ConfigError / DomainError on bad input and
/// NumericError on numerical failure.
Artifact execute(const ExperimentConfig& config);

/// Writes `bytes` to a temporary sibling file and renames it over `path`, so
/// readers never observe a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

struct RunOverrides {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// Loads the config, applies overrides, executes and writes the artifact to
/// the output path (stdout when none is set). Returns an exit code; one-line
/// diagnostics go to `err`.
int run_command(const std::string& command, const std::string& config_path,
                const RunOverrides& overrides, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Human-readable summary of the artifacts in `target` (a file or a
/// directory). Writes gnuplot data for clt artifacts when `plot` is given.
/// Returns 2 when nothing readable is found.
int report(const std::filesystem::path& target, const std::optional<std::filesystem::path>& plot,
           std::ostream& out, std::ostream& err);

}  // namespace xmem
