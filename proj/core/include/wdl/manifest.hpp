#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wdl/spectrum.hpp"

namespace wdl {

struct OutputDigest {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

/// Everything needed to re-run a subcommand.  Timestamps are the only
/// fields that differ between identical runs.
struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  std::map<std::string, std::string> options;  // effective CLI options (not --jobs, --out)
  std::string config;                          // canonical INI snapshot
  std::string params_hash;                     // 8 hex digits
  std::uint64_t seed = 0;
  std::string started, finished;               // ISO-8601 UTC
  std::vector<OutputDigest> outputs;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  void write(const std::filesystem::path& path) const;
  static RunManifest read(const std::filesystem::path& path);
};

std::string sha256_hex(const void* data, std::size_t n);
std::string sha256_file(const std::filesystem::path& path);

/// First four bytes of SHA-256 of the canonical [model] section.
std::uint32_t params_hash(const ModelParams& p);
std::string hash_hex(std::uint32_t h);

std::string utc_timestamp();

}  // namespace wdl
