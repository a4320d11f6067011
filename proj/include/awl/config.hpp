#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace awl {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat key = value experiment description.  Parsing is strict: a key
// outside the schema is fatal, so a config file always reproduces the
// run that produced it.  emit() round-trips: parse(emit(c)) == c.
class RunConfig {
public:
    static RunConfig parse_string(const std::string& text);
    static RunConfig parse_file(const std::string& path);

    std::string emit() const;

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    uint64_t get_u64(const std::string& key, uint64_t fallback) const;
    // comma-separated list of reals
    std::vector<double> get_list(const std::string& key) const;

    bool operator==(const RunConfig&) const = default;

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace awl
