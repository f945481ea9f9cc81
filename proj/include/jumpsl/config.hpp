#pragma once

#include <string>

#include "json.hpp"
#include "jumpsl/problem.hpp"

namespace jumpsl {

/// Problem files: {"potential": ..., "boundary": ..., "jumps": [...]}.
/// Unknown top-level keys are ignored. Throws ConfigParseError.
ProblemSpec problem_from_json(const nlohmann::json& doc);
nlohmann::json problem_to_json(const ProblemSpec& spec);

ProblemSpec load_problem(const std::string& path);

/// Reads a whole file; ConfigParseError if unreadable.
std::string read_text_file(const std::string& path);
/// Writes through a temporary sibling and renames it into place.
void write_text_file_atomic(const std::string& path, const std::string& contents);

}  // namespace jumpsl
