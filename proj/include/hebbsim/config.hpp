#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hebbsim {

/// Flat key=value configuration store with dotted section prefixes
/// (`neuron.theta=0.94`). Every key doubles as a command-line flag
/// (`--neuron.theta=0.94` or `--neuron.theta 0.94`); later assignments win.
class KeyValueConfig {
public:
    void set(const std::string& key, const std::string& value);
    void erase(const std::string& key) { kv_.erase(key); }
    bool has(const std::string& key) const;

    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;

    /// Parse `key=value` lines; '#' starts a comment, blank lines ignored.
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    /// Apply --key=value / --key value pairs on top of the current values.
    /// Returns unconsumed positional arguments.
    std::vector<std::string> apply_args(const std::vector<std::string>& args);

    /// Canonical serialisation: sorted key=value lines, one per key.
    std::string serialize() const;
    /// FNV-1a hash of the canonical serialisation, as fixed-width hex.
    std::string hash() const;

    void write_file(const std::string& path) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace hebbsim
