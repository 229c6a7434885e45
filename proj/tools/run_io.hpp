#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace phasemem::cli {

namespace fs = std::filesystem;

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

/// 17 significant digits, scientific notation.
std::string format_real(double v);

/// Append-only output directory for one invocation. Creates `<root>/<label>-NNNN` with the
/// first unused index and never writes into an existing directory.
class RunDirectory {
 public:
  RunDirectory(const fs::path& root, const std::string& label);

  const fs::path& path() const noexcept { return dir_; }

  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);
  void write_text(const std::string& name, const std::string& text);
  void write_json(const std::string& name, const nlohmann::json& doc);

  /// Writes manifest.json (config echo, version, timestamps, file digests) and re-reads every
  /// listed file to confirm its digest. Throws std::runtime_error on mismatch.
  void finalize(const nlohmann::json& config_echo, const std::string& version);

 private:
  fs::path open_file_path(const std::string& name);

  fs::path dir_;
  std::string started_;
  std::vector<std::string> files_;
};

std::string utc_timestamp();

}  // namespace phasemem::cli
