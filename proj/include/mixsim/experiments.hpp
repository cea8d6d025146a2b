#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixsim {

// Raised for malformed or inconsistent configs. The CLI maps this to its own
// exit code so scripts can tell "bad input" from "verdict failed".
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunReport {
  std::string experiment;
  std::string config_hash;   // fnv1a-64 over the exact config bytes
  std::string config_echo;   // the config text as received
  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> artifacts;  // files written, relative to out_dir
  double wall_seconds = 0.0;           // never written into CSV artifacts

  bool all_pass() const;
  std::string to_json() const;
};

// Runs a JSON config given as text. `source_name` labels error messages
// (a file path or "<inline>"). Artifacts land in out_dir (created if absent).
RunReport run_config_text(const std::string& config_text, const std::string& out_dir,
                          const std::string& source_name);
RunReport run_config_file(const std::string& config_path, const std::string& out_dir);

struct PresetInfo {
  std::string name;
  std::string summary;
  std::string runtime_hint;
  // JSON text for config-backed presets; empty for procedural ones.
  std::string config_json;
};

const std::vector<PresetInfo>& preset_catalog();
const PresetInfo* find_preset(const std::string& name);

// Runs a named preset. Config-backed presets go through run_config_text;
// procedural ones (corpus checks, determinism rerun) are implemented directly.
RunReport run_preset(const std::string& name, const std::string& out_dir);

}  // namespace mixsim
