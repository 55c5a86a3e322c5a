#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "registry.hpp"
#include "torusfio/error.hpp"
#include "torusfio/records.hpp"

namespace tfio {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitResource = 4;

int exit_code_for(torusfio::ErrorKind kind);

/// What one subcommand produced, before anything touches the disk.
struct Artifacts {
  std::vector<torusfio::Record> records;
  torusfio::CsvTable table;
  /// extra files, name -> content
  std::vector<std::pair<std::string, std::string>> files;
  /// one human-readable line per result
  std::vector<std::string> summary;
};

/// Runs the computation of a validated config.
Artifacts execute(const ExperimentConfig& cfg, const Registry& reg);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  bool quiet = false;
};

struct RunOutcome {
  int exit_code = kExitOk;
  /// empty when the config was rejected before a run directory existed
  std::string run_dir;
};

/// Validate, execute and write <out>/<subcommand>/<hash>/{manifest.json,
/// records.jsonl, table.csv}. Errors become an error record (on `err` and in the
/// run directory when it exists) and an exit code.
RunOutcome run(const ExperimentConfig& cfg, const RunOverrides& o, std::ostream& log, std::ostream& err);
RunOutcome run_file(const std::string& config_path, const RunOverrides& o, std::ostream& log, std::ostream& err);

torusfio::Record error_record(torusfio::ErrorKind kind, int axis, const std::string& message);

/// Write-temp-then-rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace tfio
