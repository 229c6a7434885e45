#include "run_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace phasemem::cli {

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "' for hashing");

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);

  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

std::string format_real(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.16e", v);
  return b;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char b[32];
  std::strftime(b, sizeof b, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return b;
}

RunDirectory::RunDirectory(const fs::path& root, const std::string& label) : started_(utc_timestamp()) {
  fs::create_directories(root);
  for (int i = 1; i < 100000; ++i) {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "-%04d", i);
    fs::path candidate = root / (label + suffix);
    // create_directory reports false when the directory already exists
    if (fs::create_directory(candidate)) {
      dir_ = candidate;
      return;
    }
  }
  throw std::runtime_error("no free run directory under '" + root.string() + "'");
}

fs::path RunDirectory::open_file_path(const std::string& name) {
  fs::path p = dir_ / name;
  if (fs::exists(p)) throw std::runtime_error("refusing to overwrite '" + p.string() + "'");
  files_.push_back(name);
  return p;
}

void RunDirectory::write_csv(const std::string& name, const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::ofstream out(open_file_path(name), std::ios::binary);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_real(row[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + name + "'");
}

void RunDirectory::write_text(const std::string& name, const std::string& text) {
  std::ofstream out(open_file_path(name), std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + name + "'");
}

void RunDirectory::write_json(const std::string& name, const nlohmann::json& doc) {
  write_text(name, doc.dump(2) + "\n");
}

void RunDirectory::finalize(const nlohmann::json& config_echo, const std::string& version) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& name : files_) {
    const fs::path p = dir_ / name;
    files.push_back({{"path", name}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
  }
  nlohmann::json manifest{{"artifact_version", version},
                          {"started_utc", started_},
                          {"finished_utc", utc_timestamp()},
                          {"config", config_echo},
                          {"files", files}};
  {
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing manifest.json");
  }

  std::ifstream in(dir_ / "manifest.json");
  const auto reread = nlohmann::json::parse(in);
  for (const auto& f : reread.at("files")) {
    const fs::path p = dir_ / f.at("path").get<std::string>();
    if (!fs::exists(p) || sha256_file(p) != f.at("sha256").get<std::string>()) {
      throw std::runtime_error("manifest digest mismatch for '" + p.string() + "'");
    }
  }
}

}  // namespace phasemem::cli
