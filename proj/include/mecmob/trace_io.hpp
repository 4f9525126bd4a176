#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mecmob/scenario.hpp"

namespace mecmob {

inline constexpr int kTraceSchemaVersion = 1;

/// Versioned JSON document for a trace. Doubles are written with round-trip precision.
nlohmann::json trace_to_json(const ScenarioTrace& trace);

/// Throws SchemaError on a wrong version, a missing field or an inconsistent shape.
ScenarioTrace trace_from_json(const nlohmann::json& doc);

void save_trace(const ScenarioTrace& trace, const std::filesystem::path& path);
ScenarioTrace load_trace(const std::filesystem::path& path);

/// SHA-1 over "blob <size>\0<content>", hex encoded (same as `git hash-object`).
std::string git_blob_sha1(std::string_view content);

/// Content hash of the canonical JSON form of the trace.
std::string trace_hash(const ScenarioTrace& trace);

}  // namespace mecmob
