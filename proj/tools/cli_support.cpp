#include "cli_support.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace cli {

void die(int exit_code, const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(exit_code);
}

void check(mba_status status, const std::string& context) {
  if (status == MBA_OK) return;
  int code = kExitConfig;
  switch (status) {
    case MBA_ERR_PARSE:
    case MBA_ERR_IO:
    case MBA_ERR_DIMENSION:
      code = kExitData;
      break;
    case MBA_ERR_NUMERIC:
      code = kExitNumeric;
      break;
    default:
      code = kExitConfig;
      break;
  }
  die(code, context + ": " + mba_last_error());
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string git_blob_sha1(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    die(kExitNumeric, "sha1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

unsigned worker_count(std::size_t jobs) {
  unsigned workers = 0;
  if (const char* env = std::getenv("MBA_WORKERS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed < 1) die(kExitConfig, "MBA_WORKERS must be a positive integer");
    workers = static_cast<unsigned>(parsed);
  } else {
    workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  }
  return static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs, 1)));
}

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void ConfigMerger::apply_file(const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) die(kExitConfig, "cannot open config file '" + config_path + "'");
  nlohmann::json config = nlohmann::json::parse(in, nullptr, false);
  if (config.is_discarded() || !config.is_object())
    die(kExitConfig, "config file '" + config_path + "' is not a JSON object");

  for (const auto& [key, value] : config.items()) {
    bool known = false;
    for (const auto& entry : entries_) {
      if (entry.key != key) continue;
      known = true;
      std::string dashed = key;
      for (auto& ch : dashed)
        if (ch == '_') ch = '-';
      // command-line flags win over the config file
      if (app_->count("--" + dashed) == 0) {
        try {
          entry.set(value);
        } catch (const std::exception& e) {
          die(kExitConfig, "config key '" + key + "': " + e.what());
        }
      }
      break;
    }
    if (!known) die(kExitConfig, "unknown config key '" + key + "'");
  }
}

DatasetPtr load_dataset(const IngestOptions& opts) {
  mba_dataset* raw = nullptr;
  check(mba_dataset_load(opts.path.c_str(), opts.d_override, opts.max_d, &raw),
        "loading '" + opts.path + "'");
  DatasetPtr ds(raw);
  if (!opts.no_normalize) {
    mba_dataset* norm = nullptr;
    check(mba_dataset_normalize_l2(ds.get(), &norm), "normalizing '" + opts.path + "'");
    ds.reset(norm);
  }
  return ds;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) die(kExitData, "cannot write '" + path + "'");
  out << content;
  if (!out.good()) die(kExitData, "write failure on '" + path + "'");
}

std::string fmt_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

std::string fmt_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

std::vector<std::string> split_csv_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string token;
  for (char ch : csv) {
    if (ch == ',') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      token.push_back(ch);
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

}  // namespace cli
