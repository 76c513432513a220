#include "output.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace prfcli {

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::runtime_error("failed to format a double");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& schema,
                     const std::vector<std::string>& columns)
    : path_(path) {
    buffer_ += "# schema=" + schema + "\n";
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += columns[i];
    }
    buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

void CsvWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += format_double(values[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += values[i];
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    closed_ = true;
    std::ofstream out(path_, std::ios::binary);
    if (!out.is_open()) throw std::runtime_error("cannot write " + path_.string());
    out << buffer_;
    if (!out.good()) throw std::runtime_error("failed writing " + path_.string());
}

RunDirectory::RunDirectory(const std::filesystem::path& out_dir, const std::string& run_id,
                           bool force)
    : dir_(out_dir / run_id), run_id_(run_id) {
    if (std::filesystem::exists(dir_ / "manifest.json") && !force)
        throw std::runtime_error("run id '" + run_id +
                                 "' already has results; pass --force to overwrite");
    std::filesystem::create_directories(dir_);
    manifest_["schema_version"] = 1;
    manifest_["run_id"] = run_id;
}

std::filesystem::path RunDirectory::file(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
}

void RunDirectory::finalize(const std::string& command, double duration_seconds) {
    manifest_["command"] = command;
    manifest_["duration_seconds"] = duration_seconds;
    manifest_["files"] = files_;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    if (!out.is_open())
        throw std::runtime_error("cannot write manifest under " + dir_.string());
    out << manifest_.dump(2) << "\n";
}

} // namespace prfcli
