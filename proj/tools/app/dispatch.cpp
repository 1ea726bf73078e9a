#include "commands.hpp"
#include "ionbath/core/errors.hpp"

namespace ionbath::app {

void dispatch(RunContext& ctx) {
  const std::string& c = ctx.command();
  if (c == "cool") {
    cmd_cool(ctx);
  } else if (c == "thermo") {
    cmd_thermo(ctx);
  } else if (c == "budget") {
    cmd_budget(ctx);
  } else if (c == "rates") {
    cmd_rates(ctx);
  } else if (c == "spinfit") {
    cmd_spinfit(ctx);
  } else {
    throw ConfigError("unknown command '" + c + "'");
  }
  ctx.write_manifest();
}

}  // namespace ionbath::app
