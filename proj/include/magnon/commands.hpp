#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "magnon/config.hpp"
#include "magnon/result_table.hpp"

namespace magnon {

inline constexpr const char* kToolName = "magnon_ent";
inline constexpr const char* kToolVersion = "1.0.0";

/// Exit code contract of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumeric = 2, kExitIo = 3 };

/// Raised when a numerical procedure fails its own convergence check.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandResult {
  /// (file suffix, table); the main table has an empty suffix.
  std::vector<std::pair<std::string, ResultTable>> tables;
  PlotKind plot = PlotKind::None;
  std::string title;
  int exit_code = kExitOk;
  std::string message;

  ResultTable& main() { return tables.front().second; }
  const ResultTable& main() const { return tables.front().second; }
};

CommandResult cmd_evolve(const RunConfig& cfg);
CommandResult cmd_sweep_jt(const RunConfig& cfg);
CommandResult cmd_sweep_rq(const RunConfig& cfg);
/// Sets exit_code = kExitNumeric (and still returns the tables) when the
/// hierarchy convergence probe fails.
CommandResult cmd_open(const RunConfig& cfg);
CommandResult cmd_fiber(const RunConfig& cfg);
/// `query` is {"<quantity>", "key=value", ...}; throws ConfigError for an
/// unknown quantity, listing the valid names.
CommandResult cmd_analytic(const std::vector<std::string>& query);

std::vector<std::string> analytic_quantities();

/// Full command-line driver. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace magnon
