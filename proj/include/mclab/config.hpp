#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mclab {

// Flat key = value configuration. Lines hold one pair each; '#' starts a
// comment; keys may not repeat. Readers record every key they touch so that
// leftovers can be rejected, keeping configs diffable against what actually
// ran. All getters throw ConfigError on malformed values.
class KeyValueConfig {
  public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_text(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<double> get_double_list(const std::string& key, const std::string& fallback) const;

    // every stored key must have been read by now
    void require_consumed() const;

    // insertion-ordered echo of the resolved values a run actually used,
    // including defaults filled in by the getters
    const std::map<std::string, std::string>& resolved() const { return resolved_; }

  private:
    std::string raw(const std::string& key, const std::string& fallback) const;

    std::map<std::string, std::string> kv_;
    mutable std::map<std::string, std::string> resolved_;
    mutable std::set<std::string> touched_;
};

}  // namespace mclab
