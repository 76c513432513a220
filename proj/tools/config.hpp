#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prfcli {

// Key-value configuration with [section] headers, '#'/';' comments, and
// comma-separated lists. Keys are looked up as "section.key".
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key) const;

    std::optional<double> maybe_double(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

std::vector<double> parse_double_list(const std::string& text);

} // namespace prfcli
