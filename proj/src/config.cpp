#include "awl/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace awl {

namespace {

// every key any subcommand understands; anything else is a typo and fatal
const std::array<const char*, 36> kSchema = {
    "model",       "nu",          "alpha",        "beta",
    "dt",          "T",           "K",            "scheme",
    "b",           "noise_power", "ensemble",     "outputs",
    "seed",        "record_every", "u0",          "u1",
    "nu_grid",     "coupling",    "phi_mode",     "qv_window",
    "burn_in",     "gamma",       "beta_prime",   "sigma",
    "amps",        "K_ssm",       "validity_radius", "a0",
    "residual_mode", "a_grid",    "h",            "nsteps",
    "burn_in_steps", "n_checks",  "tol_rel",      "tol_slope",
};

bool known_key(const std::string& k) {
    for (const char* s : kSchema)
        if (k == s) return true;
    return false;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" +
                          v + "'");
    }
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        if (!known_key(key))
            throw ConfigError("config: unknown key '" + key + "'");
        if (c.kv_.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        c.kv_[key] = val;
    }
    return c;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

std::string RunConfig::emit() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!known_key(key)) throw ConfigError("config: unknown key '" + key + "'");
    kv_[key] = value;
}

std::string RunConfig::get_string(const std::string& key,
                                  const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

std::string RunConfig::require_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end())
        throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_double(key, it->second);
}

double RunConfig::require_double(const std::string& key) const {
    return parse_double(key, require_string(key));
}

int RunConfig::get_int(const std::string& key, int fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const double x = parse_double(key, it->second);
    const int n = static_cast<int>(x);
    if (x != static_cast<double>(n))
        throw ConfigError("config: key '" + key + "' must be an integer");
    return n;
}

uint64_t RunConfig::get_u64(const std::string& key, uint64_t fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config: key '" + key +
                          "' must be an unsigned 64-bit integer");
    return out;
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return {};
    std::vector<double> out;
    std::string item;
    std::istringstream ss(it->second);
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty())
            throw ConfigError("config: key '" + key + "' has an empty list item");
        out.push_back(parse_double(key, t));
    }
    if (out.empty())
        throw ConfigError("config: key '" + key + "' has an empty list");
    return out;
}

}  // namespace awl
