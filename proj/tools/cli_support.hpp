#pragma once

#include <mba/mba.h>

#include <CLI11.hpp>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

namespace cli {

// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

[[noreturn]] void die(int exit_code, const std::string& message);

// Checks a C API status; on failure prints mba_last_error and exits with the
// mapped code.
void check(mba_status status, const std::string& context);

// RAII over the opaque C handles.
struct DatasetDeleter {
  void operator()(mba_dataset* p) const { mba_dataset_free(p); }
};
struct AccumulatorDeleter {
  void operator()(mba_accumulator* p) const { mba_accumulator_free(p); }
};
struct ModelDeleter {
  void operator()(mba_model* p) const { mba_model_free(p); }
};
struct MixtureDeleter {
  void operator()(mba_mixture* p) const { mba_mixture_free(p); }
};
using DatasetPtr = std::unique_ptr<mba_dataset, DatasetDeleter>;
using AccumulatorPtr = std::unique_ptr<mba_accumulator, AccumulatorDeleter>;
using ModelPtr = std::unique_ptr<mba_model, ModelDeleter>;
using MixturePtr = std::unique_ptr<mba_mixture, MixtureDeleter>;

// Deterministic seed substreams for trials/stages (splitmix64 chain).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

// git-style SHA-1 of a blob's content.
std::string git_blob_sha1(const std::string& content);

std::string utc_timestamp();

// Bounded worker pool; results must be written by index so ordering follows
// input order. Worker count: explicit > MBA_WORKERS env > hardware.
unsigned worker_count(std::size_t jobs);
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& body);

// Declarative config-file merging: every flag is registered with its JSON key;
// keys present in --config are applied unless the flag was given on the
// command line, and unknown keys are rejected.
class ConfigMerger {
 public:
  explicit ConfigMerger(CLI::App* app) : app_(app) {}

  template <typename T>
  void bind(const std::string& key, T& var) {
    entries_.push_back({key, [&var](const nlohmann::json& v) { var = v.get<T>(); }});
  }

  // Applies the file (if any); returns the effective config echo including
  // every registered key's final value via the provided reader.
  void apply_file(const std::string& config_path);

 private:
  struct Entry {
    std::string key;
    std::function<void(const nlohmann::json&)> set;
  };
  CLI::App* app_;
  std::vector<Entry> entries_;
};

// Loads a dataset with the standard ingest flags.
struct IngestOptions {
  std::string path;
  std::size_t d_override = 0;
  std::size_t max_d = 0;  // 0: library default
  bool no_normalize = false;
};
DatasetPtr load_dataset(const IngestOptions& opts);

// Writes text to path, failing with the data exit code.
void write_file(const std::string& path, const std::string& content);

// Fixed-precision percent / float formatting for stable CSV output.
std::string fmt_pct(double fraction);
std::string fmt_double(double v, int precision = 6);

std::vector<std::string> split_csv_list(const std::string& csv);

}  // namespace cli
