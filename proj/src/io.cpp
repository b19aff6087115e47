#include "pnas/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "build_info.h"
#include "pnas/csv.hpp"
#include "pnas/errors.hpp"
#include "pnas/sha256.hpp"

namespace pnas {

void to_json(nlohmann::json& j, const RunManifest& m) {
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : m.outputs) {
    outs.push_back(nlohmann::json{{"path", o.path}, {"sha256", o.sha256}});
  }
  j = nlohmann::json{{"command", m.command},    {"config_path", m.config_path},
                     {"seed", m.seed},          {"build_id", m.build_id},
                     {"wall_time_ms", m.wall_time_ms}, {"outputs", outs}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
  m = RunManifest{};
  m.command = j.value("command", std::string{});
  m.config_path = j.value("config_path", std::string{});
  m.seed = j.value("seed", std::uint64_t{0});
  m.build_id = j.value("build_id", std::string{});
  m.wall_time_ms = j.value("wall_time_ms", std::int64_t{0});
  if (j.contains("outputs")) {
    for (const auto& o : j["outputs"]) {
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
    }
  }
}

std::string file_sha256(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for hashing");
  std::ostringstream buf;
  buf << f.rdbuf();
  return sha256_hex(buf.str());
}

void write_manifest_atomic(const RunManifest& m, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error("cannot open " + tmp + " for writing");
    f << nlohmann::json(m).dump(2) << '\n';
    if (!f.good()) throw Error("write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error("cannot rename " + tmp + " to " + path);
  }
}

namespace {

std::vector<ObjectivePoint> canonical_order(std::vector<ObjectivePoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const ObjectivePoint& a, const ObjectivePoint& b) {
    if (a.latency_ms != b.latency_ms) return a.latency_ms < b.latency_ms;
    if (a.peak_memory_bytes != b.peak_memory_bytes)
      return a.peak_memory_bytes < b.peak_memory_bytes;
    if (a.score != b.score) return a.score > b.score;
    return a.payload < b.payload;
  });
  return pts;
}

}  // namespace

void write_frontier_csv(const Frontier& frontier, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_csv_row(f, {"config_key", "score", "latency_ms", "peak_memory_bytes"});
  for (const ObjectivePoint& p : canonical_order(frontier.points)) {
    write_csv_row(f, {p.payload, format_double(p.score), format_double(p.latency_ms),
                      format_double(p.peak_memory_bytes)});
  }
}

void write_frontier_json(const Frontier& frontier, const SearchResult& result,
                         const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ObjectivePoint& p : canonical_order(frontier.points)) {
    const EvaluatedCandidate& c = result.by_key(p.payload);
    arr.push_back(nlohmann::json{{"config_key", p.payload},
                                 {"score", p.score},
                                 {"latency_ms", p.latency_ms},
                                 {"peak_memory_bytes", p.peak_memory_bytes},
                                 {"proxy_name", c.proxy.proxy_name},
                                 {"iteration_added", c.iteration_added},
                                 {"config", c.config}});
  }
  nlohmann::json doc{
      {"mode", frontier.mode == FrontierMode::NonDominated ? "nd" : "hull"},
      {"points", arr},
  };
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << doc.dump(2) << '\n';
}

void write_archive_csv(const SearchResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_csv_row(f, {"config_key", "score", "latency_ms", "peak_memory_bytes",
                    "iteration_added"});
  for (const EvaluatedCandidate& c : result.archive) {
    write_csv_row(f, {c.key, format_double(c.proxy.value), format_double(c.cost.latency_ms),
                      std::to_string(c.cost.peak_memory_bytes),
                      std::to_string(c.iteration_added)});
  }
}

void write_search_log_jsonl(const std::vector<IterationRecord>& log, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  for (const IterationRecord& r : log) {
    nlohmann::json j{{"iteration", r.iteration},
                     {"evaluated", r.evaluated},
                     {"discarded", r.discarded},
                     {"frontier_size", r.frontier_size},
                     {"hypervolume", r.hypervolume}};
    f << j.dump() << '\n';
  }
}

std::string build_id() { return detail::kBuildId; }

}  // namespace pnas
