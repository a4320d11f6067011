#include "awl/io.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "awl/rng.hpp"

namespace awl {

std::string format_double(double x) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << "\r\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv row width != header width");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << "\r\n";
    }
}

void write_jsonl(const std::string& path,
                 const std::vector<nlohmann::json>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (const auto& row : rows) out << row.dump() << '\n';
}

uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

void write_manifest(const std::string& dir, const RunConfig& config,
                    const std::vector<std::string>& files, int abort_count,
                    double wall_seconds) {
    const std::string cfg = config.emit();
    nlohmann::json m;
    m["artifact_version"] = "1.0.0";
    m["config"] = cfg;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(cfg)));
    m["config_hash"] = hash;
    m["wall_seconds"] = wall_seconds;
    m["aborted_trajectories"] = abort_count;
    nlohmann::json sums = nlohmann::json::object();
    for (const auto& f : files) {
        char cs[32];
        std::snprintf(cs, sizeof(cs), "%016llx",
                      static_cast<unsigned long long>(
                          file_checksum((std::filesystem::path(dir) / f).string())));
        sums[f] = cs;
    }
    m["checksums"] = sums;
    const auto path = std::filesystem::path(dir) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << m.dump(2) << '\n';
}

}  // namespace awl
