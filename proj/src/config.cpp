#include "mse/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mse {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config file '" + path + "' cannot be opened");
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_string(buf.str());
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                              "' appears before any [section]");
        const std::string full = section + "." + key;
        if (!cfg.entries_.emplace(full, Entry{value, false}).second)
            throw ConfigError("duplicate key '" + full + "'");
    }
    return cfg;
}

const Config::Entry* Config::find(const std::string& section,
                                  const std::string& key) const {
    const auto it = entries_.find(section + "." + key);
    if (it == entries_.end()) return nullptr;
    it->second.consumed = true;
    return &it->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

std::string Config::require_string(const std::string& section,
                                   const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw ConfigError("missing required key '" + section + "." + key + "'");
    return e->value;
}

double Config::get_number(const std::string& section, const std::string& key,
                          double fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    double v = 0.0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("key '" + section + "." + key + "': expected a number, got '" +
                          e->value + "'");
    return v;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::int64_t v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("key '" + section + "." + key + "': expected an integer, got '" +
                          e->value + "'");
    return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key,
                              std::uint64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::uint64_t v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("key '" + section + "." + key +
                          "': expected an unsigned integer, got '" + e->value + "'");
    return v;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "on") return true;
    if (e->value == "false" || e->value == "0" || e->value == "off") return false;
    throw ConfigError("key '" + section + "." + key + "': expected a boolean, got '" +
                      e->value + "'");
}

std::vector<std::string> Config::get_list(const std::string& section,
                                          const std::string& key) const {
    const Entry* e = find(section, key);
    std::vector<std::string> out;
    if (!e) return out;
    std::size_t start = 0;
    const std::string& v = e->value;
    while (start <= v.size()) {
        const auto pos = v.find(',', start);
        const std::string item =
            trim(pos == std::string::npos ? v.substr(start) : v.substr(start, pos - start));
        if (!item.empty()) out.push_back(item);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

void Config::ensure_all_consumed() const {
    for (const auto& [key, entry] : entries_)
        if (!entry.consumed)
            throw ConfigError("unknown key '" + key + "'");
}

} // namespace mse
