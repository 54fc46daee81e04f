#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mse {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat sectioned key-value configuration:
///
///   # comment
///   [section]
///   key = value
///
/// Every key a command reads is marked consumed; ensure_all_consumed()
/// then rejects leftovers, so misspelled keys fail instead of being
/// silently ignored.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_number(const std::string& section, const std::string& key,
                      double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const;
    /// Comma-separated list, whitespace-trimmed entries.
    std::vector<std::string> get_list(const std::string& section,
                                      const std::string& key) const;

    /// Read without a fallback; ConfigError when missing.
    std::string require_string(const std::string& section, const std::string& key) const;

    void ensure_all_consumed() const;

private:
    struct Entry {
        std::string value;
        mutable bool consumed = false;
    };
    std::map<std::string, Entry> entries_; // "section.key" -> value
    const Entry* find(const std::string& section, const std::string& key) const;
};

} // namespace mse
