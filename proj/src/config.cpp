#include "mclab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "mclab/errors.hpp"

namespace mclab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

KeyValueConfig KeyValueConfig::from_text(const std::string& text) {
    KeyValueConfig out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value': '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(lineno));
        if (out.kv_.count(key))
            throw ConfigError("config: duplicate key '" + key + "' at line " + std::to_string(lineno));
        out.kv_[key] = value;
    }
    return out;
}

std::string KeyValueConfig::raw(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    std::string value = it == kv_.end() ? fallback : it->second;
    touched_.insert(key);
    resolved_[key] = value;
    return value;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    return raw(key, fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    std::ostringstream def;
    def.precision(17);
    def << fallback;
    std::string v = raw(key, def.str());
    try {
        std::size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    std::string v = raw(key, std::to_string(fallback));
    try {
        std::size_t used = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        std::uint64_t out = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an unsigned integer, got '" + v + "'");
    }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    std::string v = raw(key, std::to_string(fallback));
    try {
        std::size_t used = 0;
        int out = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key, const std::string& fallback) const {
    std::string v = raw(key, fallback);
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' expects comma-separated numbers, got '" + v + "'");
        }
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' expects a non-empty number list");
    return out;
}

void KeyValueConfig::require_consumed() const {
    std::string unknown;
    for (const auto& [key, value] : kv_)
        if (!touched_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    if (!unknown.empty()) throw ConfigError("config: unknown keys: " + unknown);
}

}  // namespace mclab
