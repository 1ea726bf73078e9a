#pragma once

#include "run_context.hpp"

namespace ionbath::app {

/// Each command reads its keys from the context configuration and writes its artifacts
/// into the context output directory. Errors propagate as ConfigError / DomainError
/// (exit code 2) or NumericalError (exit code 3).
void cmd_cool(RunContext& ctx);
void cmd_thermo(RunContext& ctx);
void cmd_budget(RunContext& ctx);
void cmd_rates(RunContext& ctx);
void cmd_spinfit(RunContext& ctx);

/// Runs the named command and writes the manifest.
void dispatch(RunContext& ctx);

}  // namespace ionbath::app
