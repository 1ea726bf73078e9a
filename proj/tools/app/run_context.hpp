#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ionbath/core/config.hpp"
#include "ionbath/io/table.hpp"

namespace ionbath::app {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a command needs: the merged configuration, the seed, the worker count
/// and the output directory. Records every artifact it writes for the manifest.
class RunContext {
 public:
  RunContext(std::string command, std::string preset, KeyValueConfig config, std::uint64_t seed, int workers,
             std::filesystem::path out_dir);

  const std::string& command() const { return command_; }
  const std::string& preset() const { return preset_; }
  const KeyValueConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  int workers() const { return workers_; }
  const std::filesystem::path& out_dir() const { return out_dir_; }

  void write_table(const std::string& name, const io::Table& table);
  /// Writes pre-formatted text (used for tables with a label column).
  void write_text(const std::string& name, const std::string& text);
  void write_json(const std::string& name, const nlohmann::ordered_json& value);
  /// Writes manifest.txt: run metadata, the full configuration and the artifact list.
  void write_manifest() const;

  /// Directory for caches shared between runs (IONBATH_CACHE, else <out>/../.cache).
  std::filesystem::path cache_dir() const;

 private:
  std::string command_;
  std::string preset_;
  KeyValueConfig config_;
  std::uint64_t seed_;
  int workers_;
  std::filesystem::path out_dir_;
  std::vector<std::string> artifacts_;
};

/// Directory holding the desk/paper preset files.
std::filesystem::path preset_dir();
/// Loads a preset and resolves its relative data paths against the preset directory.
KeyValueConfig load_preset(const std::string& name);
/// Loads a user config (relative `*_data` paths resolve against the file's directory).
KeyValueConfig load_config_file(const std::filesystem::path& path);
/// Default output root: $IONBATH_OUT, else ./ionbath_out.
std::filesystem::path default_output_root();

/// What the command line asks for: preset, then config file, then key=value overrides.
struct RunRequest {
  std::string command;
  std::string preset = "desk";
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;  // default: the configured `seed` key
  std::string out;                    // default: <output root>/<command>
  int workers = 0;                    // 0: all available cores
};

std::unique_ptr<RunContext> make_context(const RunRequest& request);
/// Rebuilds the context of an earlier run from its manifest.txt.
std::unique_ptr<RunContext> context_from_manifest(const std::filesystem::path& manifest, const std::string& out,
                                                  int workers);
/// Positive values pass through; 0 selects the hardware concurrency.
int resolve_workers(int requested);

/// Splits "1,2,3" into numbers; throws ConfigError naming the key.
std::vector<double> parse_list(const KeyValueConfig& cfg, const std::string& key);

}  // namespace ionbath::app
