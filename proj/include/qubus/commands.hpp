#pragma once

// Subcommand bodies behind the `qubus` executable. Each returns its CSV and
// a plain-text report; the executable decides where they go.

#include <array>
#include <optional>
#include <string>

#include "qubus/config.hpp"
#include "qubus/parity_circuit.hpp"

namespace qubus {

enum ExitCode : int { kExitOk = 0, kExitVerify = 1, kExitConfig = 2, kExitRuntime = 3 };

struct CommandResult {
  int exit_code = kExitOk;
  std::string csv;
  std::string report;
  std::string event_log;  // mc only
};

CommandResult cmd_purify(const RunConfig& cfg);
CommandResult cmd_fig3(const RunConfig& cfg);
CommandResult cmd_table(const RunConfig& cfg);
CommandResult cmd_fig4(const RunConfig& cfg);
/// Default unitaries unless `unitaries` is given (fault injection).
CommandResult cmd_verify_circuit(
    const std::optional<std::array<LocalUnitary, 4>>& unitaries = std::nullopt);
CommandResult cmd_mc(const RunConfig& cfg);

}  // namespace qubus
