#include "qplas/output.hpp"

#include <fstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "qplas/error.hpp"

#ifndef QPLAS_VERSION
#define QPLAS_VERSION "0.0.0"
#endif

namespace qplas {

const char* version() { return QPLAS_VERSION; }

std::string format_real(double v) { return fmt::format("{:.11e}", v + 0.0); }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void OutputSet::add(const std::string& name, const std::string& content) {
  std::ofstream f(dir_ / name, std::ios::binary);
  f << content;
  if (!f) throw Error("cannot write " + (dir_ / name).string());
  entries_.push_back({name, sha256_hex(content), content.size()});
}

void OutputSet::write_manifest(const std::string& subcommand, const std::string& config_text,
                               double wall_time_s) const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["version"] = version();
  j["config_sha256"] = sha256_hex(config_text);
  j["wall_time_s"] = wall_time_s;
  j["files"] = nlohmann::json::array();
  for (const auto& e : entries_)
    j["files"].push_back({{"name", e.name}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  std::ofstream f(dir_ / "manifest.json");
  f << j.dump(2) << "\n";
  if (!f) throw Error("cannot write manifest.json");
}

}  // namespace qplas
