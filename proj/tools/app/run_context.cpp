#include "run_context.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "ionbath/core/errors.hpp"

namespace ionbath::app {

namespace {

bool is_data_key(const std::string& key) {
  const std::string suffix = "_data";
  return key.size() > suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void resolve_paths(KeyValueConfig& cfg, const std::filesystem::path& base) {
  for (const std::string& key : cfg.keys()) {
    if (!is_data_key(key)) continue;
    std::filesystem::path p = cfg.get_string(key);
    if (p.empty() || p.is_absolute()) continue;
    cfg.set(key, std::filesystem::weakly_canonical(base / p).string());
  }
}

}  // namespace

RunContext::RunContext(std::string command, std::string preset, KeyValueConfig config, std::uint64_t seed,
                       int workers, std::filesystem::path out_dir)
    : command_(std::move(command)), preset_(std::move(preset)), config_(std::move(config)), seed_(seed),
      workers_(workers), out_dir_(std::move(out_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec || !std::filesystem::is_directory(out_dir_)) {
    throw ConfigError("output directory " + out_dir_.string() + " is not writable");
  }
}

void RunContext::write_table(const std::string& name, const io::Table& table) {
  io::write_table(out_dir_ / name, table);
  artifacts_.push_back(name);
}

void RunContext::write_text(const std::string& name, const std::string& text) {
  std::ofstream out(out_dir_ / name);
  if (!out) throw ConfigError("cannot write " + (out_dir_ / name).string());
  out << text;
  artifacts_.push_back(name);
}

void RunContext::write_json(const std::string& name, const nlohmann::ordered_json& value) {
  std::ofstream out(out_dir_ / name);
  if (!out) throw ConfigError("cannot write " + (out_dir_ / name).string());
  out << value.dump(2) << "\n";
  artifacts_.push_back(name);
}

void RunContext::write_manifest() const {
  std::ofstream out(out_dir_ / "manifest.txt");
  if (!out) throw ConfigError("cannot write manifest in " + out_dir_.string());
  out << "# ionbath run manifest; replay with: ionbath replay <this file>\n";
  out << "ionbath.version=" << kVersion << "\n";
  out << "ionbath.command=" << command_ << "\n";
  out << "ionbath.preset=" << preset_ << "\n";
  out << "ionbath.seed=" << seed_ << "\n";
  std::string list;
  for (const std::string& a : artifacts_) list += (list.empty() ? "" : ",") + a;
  out << "ionbath.artifacts=" << list << "\n";
  out << config_.to_string();
}

std::filesystem::path RunContext::cache_dir() const {
  if (const char* env = std::getenv("IONBATH_CACHE"); env != nullptr && *env != '\0') return env;
  return out_dir_.parent_path() / ".cache";
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("IONBATH_PRESET_DIR"); env != nullptr && *env != '\0') return env;
  return IONBATH_PRESET_DIR;
}

KeyValueConfig load_preset(const std::string& name) {
  if (name != "desk" && name != "paper") throw ConfigError("unknown preset '" + name + "' (use desk or paper)");
  const std::filesystem::path file = preset_dir() / (name + ".cfg");
  if (!std::filesystem::exists(file)) throw ConfigError("preset file " + file.string() + " not found");
  KeyValueConfig cfg = KeyValueConfig::load(file);
  resolve_paths(cfg, file.parent_path());
  return cfg;
}

KeyValueConfig load_config_file(const std::filesystem::path& path) {
  KeyValueConfig cfg = KeyValueConfig::load(path);
  resolve_paths(cfg, std::filesystem::absolute(path).parent_path());
  return cfg;
}

std::filesystem::path default_output_root() {
  if (const char* env = std::getenv("IONBATH_OUT"); env != nullptr && *env != '\0') return env;
  return "ionbath_out";
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::unique_ptr<RunContext> make_context(const RunRequest& r) {
  KeyValueConfig cfg = load_preset(r.preset);
  if (!r.config_file.empty()) cfg.merge(load_config_file(r.config_file));
  for (const std::string& kv : r.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const auto seed = r.seed ? *r.seed : static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  cfg.set("seed", std::to_string(seed));
  const std::filesystem::path out = r.out.empty() ? default_output_root() / r.command : std::filesystem::path(r.out);
  return std::make_unique<RunContext>(r.command, r.preset, std::move(cfg), seed, resolve_workers(r.workers), out);
}

std::unique_ptr<RunContext> context_from_manifest(const std::filesystem::path& path, const std::string& out,
                                                  int workers) {
  const KeyValueConfig manifest = KeyValueConfig::load(path);
  KeyValueConfig cfg;
  for (const std::string& key : manifest.keys()) {
    if (key.rfind("ionbath.", 0) != 0) cfg.set(key, manifest.get_string(key));
  }
  const std::string command = manifest.get_string("ionbath.command");
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(manifest.get_string("ionbath.seed"));
  } catch (const std::exception&) {
    throw ConfigError(path.string() + ": ionbath.seed is not an unsigned integer");
  }
  const std::filesystem::path dir = out.empty() ? default_output_root() / (command + "_replay") : std::filesystem::path(out);
  return std::make_unique<RunContext>(command, manifest.get_string("ionbath.preset", ""), std::move(cfg), seed,
                                      resolve_workers(workers), dir);
}

std::vector<double> parse_list(const KeyValueConfig& cfg, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(cfg.get_string(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
  return out;
}

}  // namespace ionbath::app
