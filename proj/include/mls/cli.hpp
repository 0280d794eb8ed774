#ifndef MLS_CLI_HPP
#define MLS_CLI_HPP

// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 input
// error, 3 nonfunctional findings, 4 uncertifiable findings.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mls::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kInputError = 2,
  kNonfunctional = 3,
  kUncertifiable = 4,
};

enum class ReportFormat { Text, Json };

/// Evaluates a script in a fresh interpreter, auto-printing visible
/// top-level values.
int run_file(const std::string& path, std::optional<std::int64_t> seed, std::ostream& out, std::ostream& err);

/// Read-eval-print loop. Prompts are written only when `prompt` is set.
int repl(std::istream& in, std::ostream& out, std::ostream& err, bool prompt);

/// Analyzes every `.mls` file named or found under a directory; each file
/// is one module named after its stem.
int analyze(const std::vector<std::string>& paths, ReportFormat format, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err,
         bool interactive = false);

}  // namespace mls::cli

#endif  // MLS_CLI_HPP
