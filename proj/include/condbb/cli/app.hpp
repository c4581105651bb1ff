#pragma once

#include "condbb/cli/problem.hpp"

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

namespace condbb::cli {

inline constexpr const char* version = "0.1.0";

/// Command-line overrides; unset fields fall back to the document's
/// parameters, then to defaults.
struct Options {
  std::string command;
  std::optional<std::string> tolerance;  // as typed, parsed like a JSON number
  bool exact = false;
  std::optional<std::string> mode;
  bool diagonal_only = false;
  std::uint64_t seed = 0;
  bool timing = false;
};

/// Commands accepted by run(); verify and generate are separate entry points.
const std::vector<std::string>& command_names();

/// Runs one command on a problem document and returns the report.
Json run(const Options& options, const Json& problem);

/// Recomputes every claim in `report` from `problem` and the report's own
/// outputs. Throws VerificationError listing every violation. Problems with
/// the problem document itself surface as InvalidArgument.
void verify(const Json& problem, const Json& report);

/// A random, valid problem document for `command` (or "partition-multi").
Json generate(const std::string& command, std::uint64_t seed, std::size_t cells, SpaceMode mode);

/// 2 schema, 3 mathematical precondition, 4 verification, 1 anything else.
int exit_code(const std::exception& e);

/// Machine-readable error description for stderr.
Json error_json(const std::exception& e);

}  // namespace condbb::cli
