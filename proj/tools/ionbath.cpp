// ionbath: batch front end for the ion-in-atomic-bath toolkit.
//
//   ionbath <command> [--preset desk|paper] [--config FILE] [--set key=value]...
//                     [--seed N] [--out DIR] [--workers N]
//   ionbath replay MANIFEST [--out DIR] [--workers N]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <tbb/global_control.h>

#include "app/commands.hpp"
#include "ionbath/core/errors.hpp"

namespace {

namespace app = ionbath::app;

void add_common(CLI::App* sub, app::RunRequest& r) {
  sub->add_option("--preset", r.preset, "Scale preset")->check(CLI::IsMember({"desk", "paper"}));
  sub->add_option("--config", r.config_file, "Configuration file merged over the preset")->check(CLI::ExistingFile);
  sub->add_option("--set", r.overrides, "Override one key (key=value); repeatable");
  sub->add_option("--seed", r.seed, "Master seed (default: the configured seed)");
  sub->add_option("--out", r.out, "Output directory (default: $IONBATH_OUT/<command>)");
  sub->add_option("--workers", r.workers, "Worker threads (0: all available cores)")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"ionbath: trapped ion in an ultracold atomic bath"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", app::kVersion);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"cool", "Molecular-dynamics cooling curve, plateau histogram and fit"},
      {"thermo", "Rabi, Doppler and micromotion thermometry reports"},
      {"budget", "Energy budget and excess-micromotion tables"},
      {"rates", "Spin-exchange rate constant versus collision energy"},
      {"spinfit", "Chi-square fit of spin-flip data over (a_S, a_T, n_L)"}};
  std::map<std::string, app::RunRequest> requests;
  for (const auto& [name, help] : commands) {
    requests[name].command = name;
    add_common(cli.add_subcommand(name, help), requests[name]);
  }

  std::string manifest, replay_out;
  int replay_workers = 0;
  CLI::App* replay = cli.add_subcommand("replay", "Rerun a command from its manifest");
  replay->add_option("manifest", manifest, "manifest.txt of an earlier run")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "Output directory (default: $IONBATH_OUT/<command>_replay)");
  replay->add_option("--workers", replay_workers, "Worker threads (0: all available cores)")
      ->check(CLI::NonNegativeNumber);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::unique_ptr<app::RunContext> ctx;
    if (replay->parsed()) {
      ctx = app::context_from_manifest(manifest, replay_out, replay_workers);
    } else {
      for (const auto& [name, help] : commands) {
        if (cli.got_subcommand(name)) ctx = app::make_context(requests[name]);
      }
    }
    tbb::global_control pool(tbb::global_control::max_allowed_parallelism, static_cast<std::size_t>(ctx->workers()));
    app::dispatch(*ctx);
    std::cout << ctx->command() << ": wrote " << ctx->out_dir().string() << "\n";
    return 0;
  } catch (const ionbath::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ionbath::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const ionbath::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
