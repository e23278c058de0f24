#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace bistab::csv {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// CSV artifact: one comment line with the config hash and seed, a header
/// row, then data rows. Byte-deterministic for a fixed run.
class Writer {
 public:
  Writer(const std::filesystem::path& path, std::uint64_t config_hash, std::uint64_t seed,
         const std::vector<std::string>& header)
      : os_(path, std::ios::trunc) {
    if (!os_) throw std::runtime_error("csv: cannot open " + path.string());
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash));
    os_ << "# config_hash=" << buf << " seed=" << seed << "\n";
    for (std::size_t i = 0; i < header.size(); ++i)
      os_ << header[i] << (i + 1 < header.size() ? "," : "\n");
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i)
      os_ << fields[i] << (i + 1 < fields.size() ? "," : "\n");
    os_.flush();
  }

  void comment(const std::string& text) { os_ << "# " << text << "\n"; }

 private:
  std::ofstream os_;
};

}  // namespace bistab::csv
