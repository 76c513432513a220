#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace prfcli {

// Locale-independent shortest round-trip formatting; '.' decimal separator.
std::string format_double(double value);

// Streams rows into a CSV file with a versioned schema comment line. Every
// double is written via format_double so identical runs are byte-identical.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::string& schema,
              const std::vector<std::string>& columns);
    ~CsvWriter();

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    void close();

  private:
    std::string buffer_;
    std::filesystem::path path_;
    bool closed_ = false;
};

// Per-run artifact directory: refuses to reuse a run id that already has a
// manifest unless forced, collects the emitted file list, and writes
// manifest.json at the end.
class RunDirectory {
  public:
    RunDirectory(const std::filesystem::path& out_dir, const std::string& run_id, bool force);

    const std::filesystem::path& path() const { return dir_; }
    std::filesystem::path file(const std::string& name);

    nlohmann::json& manifest() { return manifest_; }
    void finalize(const std::string& command, double duration_seconds);

  private:
    std::filesystem::path dir_;
    std::string run_id_;
    std::vector<std::string> files_;
    nlohmann::json manifest_;
};

} // namespace prfcli
