#pragma once
// Run configuration and experiment drivers behind the `epath` executable.
//
// A config is a flat `key = value` text file ('#' starts a comment). The
// manifest.json written by a run can be passed back as a config; its
// "config" object is read instead.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace epath::cli {

enum class Experiment { Chessboard, Carrier, Propagate, Ring };

std::optional<Experiment> parse_experiment(const std::string& name);
std::string experiment_name(Experiment e);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Diagnostic {
  std::string key;
  std::string message;
};

/// Resolved key/value pairs. Every known key is present after construction.
class RunConfig {
 public:
  RunConfig();

  /// Later calls win. Unknown keys are kept so validate() can name them.
  void set(const std::string& key, const std::string& value);
  /// "key=value"
  void apply_override(const std::string& assignment);
  void load_file(const std::filesystem::path& path);
  void load_text(const std::string& text);

  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  int get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;
  /// 0 for "auto".
  int threads() const;
  Experiment experiment() const;

  /// Canonical `key = value` text, sorted by key.
  std::string to_text() const;

 private:
  std::map<std::string, std::string> values_;
};

/// All violations; empty means valid. Never throws.
std::vector<Diagnostic> validate(const RunConfig& config);

/// Executes the configured experiment. Returns 0 on success, 2 on
/// validation errors, 1 on runtime errors. Progress and errors go to `log`.
int run(const RunConfig& config, std::ostream& log);

/// Files a run writes for `experiment`, relative to output_dir; the manifest
/// lists each with its SHA-256.
std::vector<std::string> artifact_names(Experiment experiment);

}  // namespace epath::cli
