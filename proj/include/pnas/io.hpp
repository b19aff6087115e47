#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnas/evolution.hpp"
#include "pnas/pareto.hpp"

namespace pnas {

struct ManifestOutput {
  std::string path;  // relative to the manifest's directory
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string build_id;
  std::int64_t wall_time_ms = 0;
  std::vector<ManifestOutput> outputs;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

std::string file_sha256(const std::string& path);

// Written to <path>.tmp then renamed, so a crash never leaves a partial
// manifest under the final name.
void write_manifest_atomic(const RunManifest& m, const std::string& path);

// Rows sorted by (latency, memory, score descending, key): the file is a
// pure function of the frontier set, byte-identical for identical runs.
// Columns: config_key, score, latency_ms, peak_memory_bytes.
void write_frontier_csv(const Frontier& frontier, const std::string& path);

// Same order, with each member's full config attached from the archive.
void write_frontier_json(const Frontier& frontier, const SearchResult& result,
                         const std::string& path);

// Archive in insertion order with the iteration each candidate entered.
void write_archive_csv(const SearchResult& result, const std::string& path);

// One compact JSON object per line: iteration, evaluated, discarded,
// frontier_size, hypervolume.
void write_search_log_jsonl(const std::vector<IterationRecord>& log, const std::string& path);

// Configure-time git id, "unknown" outside a checkout.
std::string build_id();

}  // namespace pnas
