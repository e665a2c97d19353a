#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "netreplica/types.hpp"

namespace netreplica {

// CTP JSONL: one profile per line,
//   {"id","source_trace","prefix","direction","window_start_s",
//    "window_duration_s","bin_width_ms","bins":[...],"metrics":{...}}
// bins are raw byte counts.

nlohmann::ordered_json profile_to_json(const CrossTrafficProfile& p);
CrossTrafficProfile profile_from_json(const nlohmann::json& j);

std::string profile_to_jsonl_line(const CrossTrafficProfile& p);
CrossTrafficProfile profile_from_jsonl_line(const std::string& line);

void write_profiles_jsonl(const std::string& path,
                          const std::vector<CrossTrafficProfile>& profiles);

// Throws ingest-style parse errors with 1-based line numbers on bad input.
std::vector<CrossTrafficProfile> read_profiles_jsonl(const std::string& path);

}  // namespace netreplica
