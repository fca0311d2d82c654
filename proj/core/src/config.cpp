#include "mbda/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mbda {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::size_t used = 0;
    double value = std::stod(it->second, &used);
    if (trim(it->second.substr(used)) != "")
        throw std::invalid_argument("config: bad number for '" + key + "': " + it->second);
    return value;
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::size_t used = 0;
    int value = std::stoi(it->second, &used);
    if (trim(it->second.substr(used)) != "")
        throw std::invalid_argument("config: bad integer for '" + key + "': " + it->second);
    return value;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string v = trim(it->second);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: bad boolean for '" + key + "': " + it->second);
}

std::vector<int> ConfigMap::get_int_list(const std::string& key,
                                         const std::vector<int>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<int> out;
    std::string item;
    std::istringstream stream(it->second);
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::invalid_argument("config: empty list element for '" + key + "'");
        out.push_back(std::stoi(item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for '" + key + "'");
    return out;
}

std::string ConfigMap::render() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
    return out.str();
}

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap map;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        map.set(key, value);
    }
    return map;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace mbda
