#pragma once

#include <map>
#include <string>
#include <vector>

namespace mbda {

/// Flat key = value configuration ('#' starts a comment, blank lines are
/// skipped). Later assignments override earlier ones.
class ConfigMap {
public:
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    /// Canonical one-line-per-key rendering (sorted), used for config echoes.
    std::string render() const;

private:
    std::map<std::string, std::string> values_;
};

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

}  // namespace mbda
