#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "awl/config.hpp"

namespace awl {

// shortest representation that round-trips the exact double
std::string format_double(double x);

// RFC-4180 CSV; all cells numeric so no quoting is ever needed
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// one JSON object per line
void write_jsonl(const std::string& path,
                 const std::vector<nlohmann::json>& rows);

uint64_t file_checksum(const std::string& path);

// Written after every other file so its presence marks a completed run.
// Contains the config verbatim, so a run is reproducible from its own
// output directory.
void write_manifest(const std::string& dir, const RunConfig& config,
                    const std::vector<std::string>& files, int abort_count,
                    double wall_seconds);

}  // namespace awl
