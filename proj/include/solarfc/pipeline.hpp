#pragma once

#include <map>
#include <string>
#include <vector>

namespace solarfc {

// Flat key=value configuration shared by the config file, the CLI flags
// and the run manifests. Unknown keys are rejected at set time.
class RunConfig {
 public:
  void set(const std::string& key, const std::string& value);
  void merge_file(const std::string& path);  // file values do not override existing keys

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;                      // throws if missing
  std::string get_or(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<int> get_int_list(const std::string& key) const;        // comma-separated

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Execute one subcommand: ingest, clearsky, features, train, evaluate,
// predict or report. Writes the declared outputs plus a `<out>.manifest`
// config snapshot next to the primary output. Throws solarfc::Error.
void run_subcommand(const std::string& name, const RunConfig& config);

// Re-run the subcommand recorded in a manifest file.
void run_manifest(const std::string& manifest_path);

}  // namespace solarfc
