#include "hebbsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hebbsim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw std::invalid_argument("config: empty key");
    kv_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string KeyValueConfig::get(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw std::out_of_range("config: missing key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key,
                                   const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' is not a number: '" + v + "'");
    }
}

double KeyValueConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        const std::int64_t x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' is not an integer: '" + v +
                                    "'");
    }
}

std::int64_t KeyValueConfig::get_int_or(const std::string& key,
                                        std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
    const std::string v = get(key);
    std::vector<double> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + key +
                                        "' has a non-numeric list item: '" + item + "'");
        }
    }
    if (out.empty()) {
        throw std::invalid_argument("config: key '" + key + "' is an empty list");
    }
    return out;
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value: '" + line + "'");
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

std::vector<std::string> KeyValueConfig::apply_args(const std::vector<std::string>& args) {
    std::vector<std::string> positional;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0) {
            positional.push_back(a);
            continue;
        }
        const std::string body = a.substr(2);
        const auto eq = body.find('=');
        if (eq != std::string::npos) {
            set(body.substr(0, eq), body.substr(eq + 1));
        } else {
            if (i + 1 >= args.size()) {
                throw std::invalid_argument("config: flag '--" + body + "' needs a value");
            }
            set(body, args[++i]);
        }
    }
    return positional;
}

std::string KeyValueConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : kv_) {  // std::map iterates in key order
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::string KeyValueConfig::hash() const {
    const std::string text = serialize();
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void KeyValueConfig::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("config: cannot write '" + path + "'");
    out << serialize();
}

}  // namespace hebbsim
