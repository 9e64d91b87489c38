#pragma once

// Deterministic artifact writing: fixed float formatting, CSV tables and a
// JSON manifest with per-file SHA-256 digests.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qplas {

const char* version();

/// 12 significant digits, scientific, locale-independent.
std::string format_real(double v);

std::string sha256_hex(std::string_view data);

struct ManifestEntry {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

/// Collects the files of one run inside `dir` and writes manifest.json last.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);

  /// Writes `content` to dir/name and records its digest.
  void add(const std::string& name, const std::string& content);

  const std::vector<ManifestEntry>& entries() const { return entries_; }
  const std::filesystem::path& dir() const { return dir_; }

  /// manifest.json: subcommand, version, config hash, wall time, files.
  void write_manifest(const std::string& subcommand, const std::string& config_text,
                      double wall_time_s) const;

 private:
  std::filesystem::path dir_;
  std::vector<ManifestEntry> entries_;
};

}  // namespace qplas
